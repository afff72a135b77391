#include "leanctx/tokenizer.hpp"

namespace leanctx {

bool is_word_char(unsigned char c) {
    if (c >= 0x80) {
        return true;
    }
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_space_char(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string lowercase_ascii(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return out;
}

std::vector<Token> RuleTokenizer::tokenize(std::string_view text) const {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space_char(c)) {
            ++i;
            continue;
        }
        if (is_word_char(c)) {
            std::size_t j = i + 1;
            while (j < n && is_word_char(static_cast<unsigned char>(text[j]))) {
                ++j;
            }
            tokens.push_back({std::string(text.substr(i, j - i)), i, j});
            i = j;
        } else {
            tokens.push_back({std::string(text.substr(i, 1)), i, i + 1});
            ++i;
        }
    }
    return tokens;
}

int RuleTokenizer::count(std::string_view text) const {
    int n = 0;
    std::size_t i = 0;
    const std::size_t len = text.size();
    while (i < len) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space_char(c)) {
            ++i;
            continue;
        }
        if (is_word_char(c)) {
            ++i;
            while (i < len && is_word_char(static_cast<unsigned char>(text[i]))) {
                ++i;
            }
        } else {
            ++i;
        }
        ++n;
    }
    return n;
}

} // namespace leanctx
