#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace leanctx {

// Maps text to a unit-norm vector of fixed dimension. Implementations must be
// deterministic for identical input and safe to share across threads.
class Embedder {
public:
    virtual ~Embedder() = default;

    virtual int dimension() const = 0;

    // Throws EmptyInput when text is blank after whitespace trimming.
    virtual std::vector<double> embed(std::string_view text) const = 0;
};

// Offline default: lowercased word tokens hashed (FNV-1a) into `dimension`
// buckets, counted, then L2-normalized. Word order does not matter.
class HashEmbedder final : public Embedder {
public:
    explicit HashEmbedder(int dimension = 64);

    int dimension() const override { return dimension_; }

    std::vector<double> embed(std::string_view text) const override;

private:
    int dimension_;
};

} // namespace leanctx
