#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace leanctx {

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Lowercased tokens used for all ROUGE scoring.
std::vector<std::string> rouge_tokens(std::string_view text);

// N-gram overlap with clipped multiset counts, n is 1 or 2.
RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n);

// Longest common subsequence over token sequences.
RougeScore rouge_l(std::string_view candidate, std::string_view reference);

} // namespace leanctx
