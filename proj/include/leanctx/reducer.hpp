#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "leanctx/corpus.hpp"
#include "leanctx/embedder.hpp"
#include "leanctx/self_information.hpp"
#include "leanctx/tokenizer.hpp"

namespace leanctx {

struct RankedSentence {
    std::size_t index = 0;
    double similarity = 0.0;
};

// A maximal run of non-kept sentences, compressed. `gap_start` is the index
// of the run's first sentence in the original context.
struct CompressedFragment {
    std::size_t gap_start = 0;
    std::string text;
};

struct ReducedContext {
    std::vector<std::size_t> kept_indices; // ascending
    std::vector<CompressedFragment> fragments;
    std::string text;
    int original_tokens = 0;
    int reduced_tokens = 0;
    double tau = 1.0;
};

// Every context sentence scored against the query embedding, sorted by cosine
// similarity descending with ties broken toward the lower index.
std::vector<RankedSentence> rank_sentences(const Context& context,
                                           std::span<const double> query_embedding,
                                           const Embedder& embedder);

// k = 0 for theta = 0, otherwise max(1, round(theta * n)). Returns the k
// highest-ranked sentence indices sorted ascending.
std::vector<std::size_t> select_top_k(const std::vector<RankedSentence>& ranked,
                                      double theta, std::size_t n);

// Drops the lowest-information units (ties: earlier occurrence drops first)
// until at most ceil((1 - rate) * original) units remain, keeping at least
// one. Survivors keep their original relative order, joined by spaces.
std::string reduce_fragment(const std::vector<std::string>& sentences, double rate,
                            const SelfInformationProvider& provider,
                            const Tokenizer& tokenizer);

// Keeps the selected sentences verbatim and replaces each maximal run of
// non-kept sentences with its compressed fragment, all in original order.
ReducedContext stitch(const Context& context, std::span<const std::size_t> kept,
                      double rate, const SelfInformationProvider& provider,
                      const Tokenizer& tokenizer);

} // namespace leanctx
