#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace leanctx {

// One lexical unit plus its byte span in the source text.
struct Token {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

class Tokenizer {
public:
    virtual ~Tokenizer() = default;

    virtual std::vector<Token> tokenize(std::string_view text) const = 0;

    virtual int count(std::string_view text) const {
        return static_cast<int>(tokenize(text).size());
    }
};

// Default tokenizer: a maximal run of letters/digits is one token, every
// other non-whitespace character is one token on its own. Bytes >= 0x80 are
// treated as word characters so multi-byte UTF-8 words stay in one run.
class RuleTokenizer final : public Tokenizer {
public:
    std::vector<Token> tokenize(std::string_view text) const override;
    int count(std::string_view text) const override;
};

bool is_word_char(unsigned char c);
bool is_space_char(unsigned char c);

std::string lowercase_ascii(std::string_view text);

} // namespace leanctx
