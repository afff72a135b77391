#include "leanctx/reducer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "leanctx/errors.hpp"
#include "leanctx/vecmath.hpp"

namespace leanctx {

std::vector<RankedSentence> rank_sentences(const Context& context,
                                           std::span<const double> query_embedding,
                                           const Embedder& embedder) {
    if (context.sentences.empty()) {
        throw EmptyInput("context has no sentences");
    }
    if (static_cast<int>(query_embedding.size()) != embedder.dimension()) {
        throw DimensionMismatch("query embedding dimension " +
                                std::to_string(query_embedding.size()) +
                                " does not match embedder dimension " +
                                std::to_string(embedder.dimension()));
    }

    std::vector<RankedSentence> ranked;
    ranked.reserve(context.sentences.size());
    for (std::size_t i = 0; i < context.sentences.size(); ++i) {
        const std::vector<double> v = embedder.embed(context.sentences[i]);
        ranked.push_back({i, cosine_similarity(v, query_embedding)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedSentence& a, const RankedSentence& b) {
        if (a.similarity != b.similarity) {
            return a.similarity > b.similarity;
        }
        return a.index < b.index;
    });
    return ranked;
}

std::vector<std::size_t> select_top_k(const std::vector<RankedSentence>& ranked,
                                      double theta, std::size_t n) {
    if (theta < 0.0 || theta > 0.4) {
        throw InvalidThreshold("theta must lie in [0, 0.4], got " + std::to_string(theta));
    }
    std::size_t k = 0;
    if (theta > 0.0) {
        k = static_cast<std::size_t>(
            std::max<long>(1, std::lround(theta * static_cast<double>(n))));
    }
    k = std::min(k, ranked.size());

    std::vector<std::size_t> kept;
    kept.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        kept.push_back(ranked[i].index);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::string reduce_fragment(const std::vector<std::string>& sentences, double rate,
                            const SelfInformationProvider& provider,
                            const Tokenizer& tokenizer) {
    if (rate < 0.0 || rate >= 1.0) {
        throw InvalidRate("rate must lie in [0, 1), got " + std::to_string(rate));
    }
    if (sentences.empty()) {
        throw EmptyInput("reduce_fragment needs at least one sentence");
    }

    std::string joined;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i > 0) {
            joined += ' ';
        }
        joined += sentences[i];
    }
    const std::vector<Token> units = tokenizer.tokenize(joined);
    if (units.empty()) {
        return "";
    }

    const std::size_t budget = static_cast<std::size_t>(
        std::ceil((1.0 - rate) * static_cast<double>(units.size())));

    // Drop order: ascending information, earlier occurrence first.
    std::vector<std::size_t> drop_order(units.size());
    for (std::size_t i = 0; i < drop_order.size(); ++i) {
        drop_order[i] = i;
    }
    std::vector<double> info(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        info[i] = provider.information(units[i].text);
    }
    std::stable_sort(drop_order.begin(), drop_order.end(),
                     [&](std::size_t a, std::size_t b) { return info[a] < info[b]; });

    std::vector<bool> dropped(units.size(), false);
    std::size_t remaining = units.size();
    for (const std::size_t idx : drop_order) {
        if (remaining <= budget || remaining <= 1) {
            break;
        }
        dropped[idx] = true;
        --remaining;
    }

    std::string out;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (dropped[i]) {
            continue;
        }
        if (!out.empty()) {
            out += ' ';
        }
        out += units[i].text;
    }
    return out;
}

ReducedContext stitch(const Context& context, std::span<const std::size_t> kept,
                      double rate, const SelfInformationProvider& provider,
                      const Tokenizer& tokenizer) {
    const std::size_t n = context.sentences.size();
    if (n == 0) {
        throw EmptyInput("context has no sentences");
    }
    std::set<std::size_t> kept_set(kept.begin(), kept.end());
    if (!kept_set.empty() && *kept_set.rbegin() >= n) {
        throw InvalidIndex("kept index " + std::to_string(*kept_set.rbegin()) +
                           " out of range for " + std::to_string(n) + " sentences");
    }

    ReducedContext result;
    result.kept_indices.assign(kept_set.begin(), kept_set.end());

    std::vector<std::string> pieces;
    std::vector<std::string> gap;
    std::size_t gap_start = 0;
    auto flush_gap = [&]() {
        if (gap.empty()) {
            return;
        }
        std::string fragment = reduce_fragment(gap, rate, provider, tokenizer);
        if (!fragment.empty()) {
            pieces.push_back(fragment);
        }
        result.fragments.push_back({gap_start, std::move(fragment)});
        gap.clear();
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (kept_set.count(i) != 0) {
            flush_gap();
            pieces.push_back(context.sentences[i]);
        } else {
            if (gap.empty()) {
                gap_start = i;
            }
            gap.push_back(context.sentences[i]);
        }
    }
    flush_gap();

    std::string text;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i > 0) {
            text += ' ';
        }
        text += pieces[i];
    }
    result.text = std::move(text);
    result.original_tokens = tokenizer.count(context_text(context));
    result.reduced_tokens = tokenizer.count(result.text);
    result.tau = static_cast<double>(result.reduced_tokens) /
                 static_cast<double>(result.original_tokens);
    return result;
}

} // namespace leanctx
