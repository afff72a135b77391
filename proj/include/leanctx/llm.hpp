#pragma once

#include <atomic>
#include <optional>
#include <string>

#include "leanctx/tokenizer.hpp"

namespace leanctx {

enum class PromptKind {
    Qa,
    CqSumDp,
    SemanticCompression,
};

// Fills the template's CONTEXT/QUERY placeholders. Qa and CqSumDp require a
// query; SemanticCompression must not receive one.
std::string render_prompt(PromptKind kind, const std::string& context,
                          const std::optional<std::string>& query);

const std::string& prompt_template(PromptKind kind);

struct CompletionRecord {
    int prompt_tokens = 0;
    int completion_tokens = 0;
    // Tokens spent on LLM-based summarization calls; zero for non-LLM reduction.
    int summary_tokens = 0;
    std::string answer;

    int total_tokens() const { return prompt_tokens + completion_tokens + summary_tokens; }
};

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;

    virtual CompletionRecord complete(const std::string& prompt) = 0;
};

// Deterministic offline provider: answers with the context sentence that has
// the highest distinct-word overlap with the question (ties toward the
// earliest sentence; first sentence when nothing overlaps).
class MockProvider final : public CompletionProvider {
public:
    MockProvider() = default;

    CompletionRecord complete(const std::string& prompt) override;

    long long calls() const { return calls_.load(); }
    void reset_calls() { calls_.store(0); }

private:
    RuleTokenizer tokenizer_;
    std::atomic<long long> calls_{0};
};

struct CostModel {
    double price_per_1k_prompt = 0.0;
    double price_per_1k_completion = 0.0;
};

double cost(const CompletionRecord& record, const CostModel& model);

// 100 * (baseline - variant) / baseline, rounded to two decimals.
double cost_savings(double total_tokens_baseline, double total_tokens_variant);

} // namespace leanctx
