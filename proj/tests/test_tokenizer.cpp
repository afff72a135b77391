#include <doctest.h>

#include <random>

#include "leanctx/tokenizer.hpp"
#include "test_support.hpp"

using leanctx::RuleTokenizer;
using leanctx::Token;

TEST_CASE("empty text has zero tokens") {
    RuleTokenizer tok;
    CHECK(tok.count("") == 0);
    CHECK(tok.tokenize("").empty());
}

TEST_CASE("plain words count one each") {
    RuleTokenizer tok;
    CHECK(tok.count("hello world") == 2);
}

TEST_CASE("punctuation characters are single tokens") {
    // don't stop, now! -> [don, ', t, stop, ",", now, !]
    RuleTokenizer tok;
    const std::vector<Token> tokens = tok.tokenize("don't stop, now!");
    REQUIRE(tokens.size() == 7);
    CHECK(tokens[0].text == "don");
    CHECK(tokens[1].text == "'");
    CHECK(tokens[2].text == "t");
    CHECK(tokens[3].text == "stop");
    CHECK(tokens[4].text == ",");
    CHECK(tokens[5].text == "now");
    CHECK(tokens[6].text == "!");
    CHECK(tok.count("don't stop, now!") == 7);
}

TEST_CASE("token spans cover their source text") {
    RuleTokenizer tok;
    const std::string text = "a1b2  ,x.\ny";
    for (const Token& token : tok.tokenize(text)) {
        CHECK(text.substr(token.begin, token.end - token.begin) == token.text);
    }
}

TEST_CASE("counting is additive across whitespace joins") {
    RuleTokenizer tok;
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const std::string a = testsupport::random_sentence(rng);
        const std::string b = testsupport::random_sentence(rng);
        CHECK(tok.count(a + " " + b) == tok.count(a) + tok.count(b));
    }
}

TEST_CASE("count matches tokenize size") {
    RuleTokenizer tok;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::string s = testsupport::random_sentence(rng) + " ... " +
                              testsupport::random_sentence(rng);
        CHECK(tok.count(s) == static_cast<int>(tok.tokenize(s).size()));
    }
}
