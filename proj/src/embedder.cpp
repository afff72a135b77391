#include "leanctx/embedder.hpp"

#include <cmath>
#include <cstdint>

#include "leanctx/errors.hpp"
#include "leanctx/tokenizer.hpp"

namespace leanctx {

namespace {

std::uint64_t fnv1a_64(std::string_view s) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (const char c : s) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ULL;
    }
    return hash;
}

} // namespace

HashEmbedder::HashEmbedder(int dimension) : dimension_(dimension) {
    if (dimension <= 0) {
        throw InvalidConfig("embedder dimension must be positive");
    }
}

std::vector<double> HashEmbedder::embed(std::string_view text) const {
    RuleTokenizer tokenizer;
    const std::vector<Token> tokens = tokenizer.tokenize(text);
    if (tokens.empty()) {
        throw EmptyInput("cannot embed blank text");
    }

    std::vector<double> vec(static_cast<std::size_t>(dimension_), 0.0);
    bool any_word = false;
    for (const Token& token : tokens) {
        if (!is_word_char(static_cast<unsigned char>(token.text[0]))) {
            continue;
        }
        any_word = true;
        const std::string unit = lowercase_ascii(token.text);
        vec[fnv1a_64(unit) % static_cast<std::uint64_t>(dimension_)] += 1.0;
    }
    if (!any_word) {
        // Punctuation-only input: hash the raw tokens so the vector is nonzero.
        for (const Token& token : tokens) {
            vec[fnv1a_64(token.text) % static_cast<std::uint64_t>(dimension_)] += 1.0;
        }
    }

    double norm = 0.0;
    for (const double x : vec) {
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : vec) {
        x /= norm;
    }
    return vec;
}

} // namespace leanctx
