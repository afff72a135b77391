#include "leanctx/sentences.hpp"

#include "leanctx/tokenizer.hpp"

namespace leanctx {

namespace {

bool is_ascii_letter(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_upper_or_digit(unsigned char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool iequal(char a, char b) {
    auto low = [](char c) {
        return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    };
    return low(a) == low(b);
}

// True when text[0..end) ends with an abbreviation entry that starts at the
// beginning of a word (so "eDr." does not match "Dr").
bool ends_with_abbreviation(std::string_view text, std::size_t end,
                            const std::vector<std::string>& abbreviations) {
    for (const std::string& abbr : abbreviations) {
        const std::size_t len = abbr.size();
        if (len == 0 || len > end) {
            continue;
        }
        bool match = true;
        for (std::size_t k = 0; k < len; ++k) {
            if (!iequal(text[end - len + k], abbr[k])) {
                match = false;
                break;
            }
        }
        if (!match) {
            continue;
        }
        if (end == len) {
            return true;
        }
        const unsigned char before = static_cast<unsigned char>(text[end - len - 1]);
        if (!is_ascii_letter(before)) {
            return true;
        }
    }
    return false;
}

std::string_view trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space_char(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && is_space_char(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

} // namespace

std::vector<std::string> segment_sentences(std::string_view text,
                                           const SegmenterOptions& options) {
    std::vector<std::string> sentences;
    const std::size_t n = text.size();
    std::size_t start = 0;

    for (std::size_t i = 0; i < n; ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') {
            continue;
        }
        std::size_t j = i + 1;
        if (j >= n || !is_space_char(static_cast<unsigned char>(text[j]))) {
            continue;
        }
        while (j < n && is_space_char(static_cast<unsigned char>(text[j]))) {
            ++j;
        }
        if (j >= n || !is_upper_or_digit(static_cast<unsigned char>(text[j]))) {
            continue;
        }
        if (c == '.' && ends_with_abbreviation(text, i, options.abbreviations)) {
            continue;
        }
        std::string_view sentence = trim(text.substr(start, i + 1 - start));
        if (!sentence.empty()) {
            sentences.emplace_back(sentence);
        }
        start = j;
    }

    std::string_view tail = trim(text.substr(start));
    if (!tail.empty()) {
        sentences.emplace_back(tail);
    }
    return sentences;
}

} // namespace leanctx
