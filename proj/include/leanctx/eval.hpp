#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "leanctx/corpus.hpp"
#include "leanctx/llm.hpp"
#include "leanctx/reducer.hpp"
#include "leanctx/rl_agent.hpp"
#include "leanctx/rouge.hpp"

namespace leanctx {

struct QAPair {
    std::string query_id;
    std::string doc_id;
    std::string question;
    std::string reference_answer;
};

// External summarizer adapter: (context, query?) -> summary string. T5-style
// models live behind this boundary.
class Summarizer {
public:
    virtual ~Summarizer() = default;

    virtual std::string summarize(const std::string& context,
                                  const std::optional<std::string>& query) = 0;
};

// Runs a shell command with the context on stdin and the query (when present)
// as the last argument; the summary is the command's stdout.
class CommandSummarizer final : public Summarizer {
public:
    explicit CommandSummarizer(std::string command);

    std::string summarize(const std::string& context,
                          const std::optional<std::string>& query) override;

private:
    std::string command_;
};

enum class MethodKind {
    Original,
    FixedK,
    AdaptiveK,
    ScOnly,
    CqSumDp,
    SemanticCompression,
    ExternalSummarizer,
    Cascade,
};

struct MethodConfig {
    MethodKind kind = MethodKind::Original;
    std::string name = "original";
    double theta = 0.1;             // FixedK
    double rate = 0.5;              // ScOnly
    std::string summarizer_command; // ExternalSummarizer
    bool cascade_adaptive = false;  // Cascade k-mode: RL policy vs fixed theta
    double cascade_theta = 0.1;
    std::shared_ptr<MethodConfig> base; // Cascade base method
};

// Parses strings like "original", "fixed_k:0.1", "adaptive_k", "sc_only:0.5",
// "cqsumdp", "semantic_compression", "external_summarizer:CMD",
// "cascade:0.1:sc_only:0.5", "cascade:rl:external_summarizer:CMD".
MethodConfig parse_method(const std::string& method);

const std::vector<std::string>& method_names();

struct EvalRecord {
    std::string query_id;
    std::string method;
    std::string answer;
    RougeScore rouge1;
    RougeScore rouge2;
    RougeScore rougeL;
    CompletionRecord completion;
    double tau = 1.0;
    double savings_vs_original = 0.0;
    bool failed = false;
    std::string error;
};

struct EvalDeps {
    const VectorStore* store = nullptr;
    const Embedder* embedder = nullptr;
    const Tokenizer* tokenizer = nullptr;
    const SelfInformationProvider* self_info = nullptr;
    CompletionProvider* llm = nullptr;
    const RLAgent* agent = nullptr;
    Summarizer* summarizer = nullptr;
    int n_chunks = 4;
    double reduction_rate = 0.8;
};

// Builds the context, applies the method's reduction, asks the QA prompt, and
// scores the answer. `baseline` (the same query's original-context record)
// feeds the per-query savings figure.
EvalRecord run_method(const MethodConfig& config, const QAPair& pair, const EvalDeps& deps,
                      const EvalRecord* baseline = nullptr);

struct MethodAggregate {
    std::string method;
    long long queries = 0;
    long long failures = 0;
    long long avg_prompt_tokens = 0;     // rounded, as reported
    long long avg_summary_tokens = 0;
    long long avg_completion_tokens = 0;
    long long avg_total_tokens = 0;
    double avg_total_exact = 0.0;        // unrounded, feeds the savings figure
    double rouge1 = 0.0;                 // 4 decimals
    double rouge2 = 0.0;
    double rougeL = 0.0;
    double cost_savings_pct = 0.0;       // 2 decimals, vs the original method
};

struct ExperimentReport {
    std::vector<MethodAggregate> aggregates;
    std::vector<EvalRecord> records;
};

// Evaluates every method on every pair. The original method is always run
// (prepended when absent) so per-query and per-method savings have a
// baseline. `concurrency` > 1 fans queries out across threads; records and
// aggregates are position-ordered either way.
ExperimentReport run_experiment(const std::vector<QAPair>& dataset,
                                const std::vector<MethodConfig>& configs,
                                const EvalDeps& deps, int concurrency = 1);

void write_report_json(const ExperimentReport& report, const std::filesystem::path& path);
std::string format_report_table(const ExperimentReport& report);

std::vector<QAPair> load_qa_jsonl(const std::filesystem::path& path);

} // namespace leanctx
