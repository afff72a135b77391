#include "leanctx/rouge.hpp"

#include <algorithm>
#include <unordered_map>

#include "leanctx/errors.hpp"
#include "leanctx/tokenizer.hpp"

namespace leanctx {

namespace {

RougeScore from_counts(double overlap, double candidate_total, double reference_total) {
    RougeScore score;
    if (candidate_total <= 0.0 || reference_total <= 0.0) {
        return score;
    }
    score.precision = overlap / candidate_total;
    score.recall = overlap / reference_total;
    if (score.precision + score.recall > 0.0) {
        score.f1 = 2.0 * score.precision * score.recall / (score.precision + score.recall);
    }
    return score;
}

std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int n) {
    std::vector<std::string> grams;
    if (static_cast<int>(tokens.size()) < n) {
        return grams;
    }
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (int j = 1; j < n; ++j) {
            gram += '\x1f';
            gram += tokens[i + static_cast<std::size_t>(j)];
        }
        grams.push_back(std::move(gram));
    }
    return grams;
}

} // namespace

std::vector<std::string> rouge_tokens(std::string_view text) {
    RuleTokenizer tokenizer;
    std::vector<std::string> tokens;
    for (const Token& token : tokenizer.tokenize(text)) {
        tokens.push_back(lowercase_ascii(token.text));
    }
    return tokens;
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n) {
    if (n != 1 && n != 2) {
        throw InvalidConfig("rouge_n supports n = 1 or 2");
    }
    const std::vector<std::string> cand = ngrams(rouge_tokens(candidate), n);
    const std::vector<std::string> ref = ngrams(rouge_tokens(reference), n);

    std::unordered_map<std::string, long long> ref_counts;
    for (const std::string& gram : ref) {
        ++ref_counts[gram];
    }
    long long overlap = 0;
    for (const std::string& gram : cand) {
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end() && it->second > 0) {
            ++overlap;
            --it->second;
        }
    }
    return from_counts(static_cast<double>(overlap), static_cast<double>(cand.size()),
                       static_cast<double>(ref.size()));
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
    const std::vector<std::string> cand = rouge_tokens(candidate);
    const std::vector<std::string> ref = rouge_tokens(reference);
    if (cand.empty() || ref.empty()) {
        return {};
    }

    // Two-row LCS table.
    std::vector<std::size_t> prev(ref.size() + 1, 0);
    std::vector<std::size_t> curr(ref.size() + 1, 0);
    for (std::size_t i = 1; i <= cand.size(); ++i) {
        for (std::size_t j = 1; j <= ref.size(); ++j) {
            if (cand[i - 1] == ref[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    const double lcs = static_cast<double>(prev[ref.size()]);
    return from_counts(lcs, static_cast<double>(cand.size()), static_cast<double>(ref.size()));
}

} // namespace leanctx
