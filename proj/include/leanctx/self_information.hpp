#pragma once

#include <string>
#include <string_view>
#include <unordered_map>

#include "leanctx/tokenizer.hpp"

namespace leanctx {

// Per-lexical-unit information score in bits, I(u) = -log2 p(u). Read-only
// after construction; implementations must be shareable across threads.
class SelfInformationProvider {
public:
    virtual ~SelfInformationProvider() = default;

    virtual double information(std::string_view unit) const = 0;
};

// Unigram frequency model with add-one smoothing over lowercased tokens.
// Unseen units score as count zero, which is the maximum smoothed value.
class UnigramModel final : public SelfInformationProvider {
public:
    UnigramModel() = default;

    void add_text(std::string_view text, const Tokenizer& tokenizer);

    double information(std::string_view unit) const override;

    long long total_count() const { return total_; }
    std::size_t vocabulary_size() const { return counts_.size(); }

private:
    std::unordered_map<std::string, long long> counts_;
    long long total_ = 0;
};

} // namespace leanctx
