#include "leanctx/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "leanctx/errors.hpp"

namespace leanctx {

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (const char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    out += "'";
    return out;
}

std::string format_double(double value, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, value);
    return buf;
}

double round_to(double value, double scale) { return std::round(value * scale) / scale; }

} // namespace

CommandSummarizer::CommandSummarizer(std::string command) : command_(std::move(command)) {
    if (command_.empty()) {
        throw InvalidConfig("summarizer command must be non-empty");
    }
}

std::string CommandSummarizer::summarize(const std::string& context,
                                         const std::optional<std::string>& query) {
    std::string command = command_;
    if (query.has_value()) {
        command += " " + shell_quote(*query);
    }

    // Feed the context through a temp file; popen gives us one pipe only.
    static std::atomic<unsigned long long> counter{0};
    const std::filesystem::path tmp =
        std::filesystem::temp_directory_path() /
        ("leanctx_sum_" + std::to_string(::getpid()) + "_" +
         std::to_string(counter.fetch_add(1)));
    {
        std::ofstream out(tmp);
        out << context;
    }
    command += " < " + shell_quote(tmp.string());

    FILE* pipe = ::popen(command.c_str(), "r");
    if (pipe == nullptr) {
        std::filesystem::remove(tmp);
        throw ProviderError("cannot run summarizer command: " + command_, false, 0);
    }
    std::string output;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
        output.append(buf, got);
    }
    const int status = ::pclose(pipe);
    std::filesystem::remove(tmp);
    if (status != 0) {
        throw ProviderError("summarizer command failed with status " +
                                std::to_string(status),
                            false, 0);
    }
    while (!output.empty() && (output.back() == '\n' || output.back() == '\r')) {
        output.pop_back();
    }
    return output;
}

const std::vector<std::string>& method_names() {
    static const std::vector<std::string> names = {
        "original",         "fixed_k:<theta>",          "adaptive_k",
        "sc_only:<rate>",   "cqsumdp",                  "semantic_compression",
        "external_summarizer:<command>", "cascade:<theta|rl>:<base_method>",
    };
    return names;
}

namespace {

[[noreturn]] void bad_method(const std::string& method) {
    std::string msg = "unknown method '" + method + "'; valid methods:";
    for (const std::string& name : method_names()) {
        msg += " " + name;
    }
    throw InvalidConfig(msg);
}

double parse_number(const std::string& method, const std::string& raw, double lo, double hi,
                    bool hi_inclusive) {
    try {
        std::size_t used = 0;
        const double value = std::stod(raw, &used);
        if (used != raw.size()) {
            bad_method(method);
        }
        if (value < lo || value > hi || (!hi_inclusive && value == hi)) {
            bad_method(method);
        }
        return value;
    } catch (const std::logic_error&) {
        bad_method(method);
    }
}

} // namespace

MethodConfig parse_method(const std::string& method) {
    MethodConfig config;
    config.name = method;

    const std::size_t colon = method.find(':');
    const std::string head = method.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : method.substr(colon + 1);

    if (head == "original" && rest.empty()) {
        config.kind = MethodKind::Original;
    } else if (head == "fixed_k" && !rest.empty()) {
        config.kind = MethodKind::FixedK;
        config.theta = parse_number(method, rest, 0.0, 0.4, true);
    } else if (head == "adaptive_k" && rest.empty()) {
        config.kind = MethodKind::AdaptiveK;
    } else if (head == "sc_only" && !rest.empty()) {
        config.kind = MethodKind::ScOnly;
        config.rate = parse_number(method, rest, 0.0, 1.0, false);
    } else if (head == "cqsumdp" && rest.empty()) {
        config.kind = MethodKind::CqSumDp;
    } else if (head == "semantic_compression" && rest.empty()) {
        config.kind = MethodKind::SemanticCompression;
    } else if (head == "external_summarizer" && !rest.empty()) {
        config.kind = MethodKind::ExternalSummarizer;
        config.summarizer_command = rest;
    } else if (head == "cascade" && !rest.empty()) {
        config.kind = MethodKind::Cascade;
        const std::size_t split = rest.find(':');
        if (split == std::string::npos) {
            bad_method(method);
        }
        const std::string kmode = rest.substr(0, split);
        if (kmode == "rl") {
            config.cascade_adaptive = true;
        } else {
            config.cascade_theta = parse_number(method, kmode, 0.0, 0.4, true);
        }
        config.base = std::make_shared<MethodConfig>(parse_method(rest.substr(split + 1)));
        if (config.base->kind == MethodKind::Cascade) {
            bad_method(method);
        }
    } else {
        bad_method(method);
    }
    return config;
}

namespace {

struct Reduction {
    std::string text;
    double tau = 1.0;
    int summary_tokens = 0;
};

Reduction apply_method(const MethodConfig& config, const QAPair& pair,
                       const Context& context, const EvalDeps& deps) {
    const std::string full_text = context_text(context);
    const int full_tokens = deps.tokenizer->count(full_text);
    auto tau_of = [&](const std::string& text) {
        return static_cast<double>(deps.tokenizer->count(text)) /
               static_cast<double>(full_tokens);
    };

    Reduction reduction;
    switch (config.kind) {
    case MethodKind::Original:
        reduction.text = full_text;
        reduction.tau = 1.0;
        break;
    case MethodKind::FixedK: {
        const std::vector<double> v_q = deps.embedder->embed(pair.question);
        const std::vector<RankedSentence> ranked =
            rank_sentences(context, v_q, *deps.embedder);
        const std::vector<std::size_t> kept =
            select_top_k(ranked, config.theta, context.sentences.size());
        const ReducedContext reduced =
            stitch(context, kept, deps.reduction_rate, *deps.self_info, *deps.tokenizer);
        reduction.text = reduced.text;
        reduction.tau = reduced.tau;
        break;
    }
    case MethodKind::AdaptiveK: {
        if (deps.agent == nullptr) {
            throw InvalidConfig("adaptive_k requires a trained agent");
        }
        const std::vector<double> v_q = deps.embedder->embed(pair.question);
        const std::vector<double> v_c = deps.embedder->embed(full_text);
        const std::size_t state = get_state(deps.agent->states, v_c, v_q);
        const double theta = deps.agent->policy(state);
        const std::vector<RankedSentence> ranked =
            rank_sentences(context, v_q, *deps.embedder);
        const std::vector<std::size_t> kept =
            select_top_k(ranked, theta, context.sentences.size());
        const ReducedContext reduced =
            stitch(context, kept, deps.reduction_rate, *deps.self_info, *deps.tokenizer);
        reduction.text = reduced.text;
        reduction.tau = reduced.tau;
        break;
    }
    case MethodKind::ScOnly: {
        reduction.text =
            reduce_fragment(context.sentences, config.rate, *deps.self_info,
                            *deps.tokenizer);
        reduction.tau = tau_of(reduction.text);
        break;
    }
    case MethodKind::CqSumDp: {
        const CompletionRecord summary = deps.llm->complete(
            render_prompt(PromptKind::CqSumDp, full_text, pair.question));
        reduction.text = summary.answer;
        reduction.tau = tau_of(reduction.text);
        reduction.summary_tokens = summary.prompt_tokens + summary.completion_tokens;
        break;
    }
    case MethodKind::SemanticCompression: {
        const CompletionRecord summary = deps.llm->complete(
            render_prompt(PromptKind::SemanticCompression, full_text, std::nullopt));
        reduction.text = summary.answer;
        reduction.tau = tau_of(reduction.text);
        reduction.summary_tokens = summary.prompt_tokens + summary.completion_tokens;
        break;
    }
    case MethodKind::ExternalSummarizer: {
        Summarizer* summarizer = deps.summarizer;
        std::unique_ptr<CommandSummarizer> owned;
        if (summarizer == nullptr) {
            owned = std::make_unique<CommandSummarizer>(config.summarizer_command);
            summarizer = owned.get();
        }
        reduction.text = summarizer->summarize(full_text, pair.question);
        reduction.tau = tau_of(reduction.text);
        break;
    }
    case MethodKind::Cascade: {
        const std::vector<double> v_q = deps.embedder->embed(pair.question);
        double theta = config.cascade_theta;
        if (config.cascade_adaptive) {
            if (deps.agent == nullptr) {
                throw InvalidConfig("cascade:rl requires a trained agent");
            }
            const std::vector<double> v_c = deps.embedder->embed(full_text);
            theta = deps.agent->policy(get_state(deps.agent->states, v_c, v_q));
        }
        const std::vector<RankedSentence> ranked =
            rank_sentences(context, v_q, *deps.embedder);
        const std::vector<std::size_t> kept =
            select_top_k(ranked, theta, context.sentences.size());
        std::string block;
        for (const std::size_t idx : kept) {
            if (!block.empty()) {
                block += ' ';
            }
            block += context.sentences[idx];
        }
        const Reduction base = apply_method(*config.base, pair, context, deps);
        reduction.text = block.empty() ? base.text : block + "\n\n" + base.text;
        reduction.tau = tau_of(reduction.text);
        reduction.summary_tokens = base.summary_tokens;
        break;
    }
    }
    return reduction;
}

} // namespace

EvalRecord run_method(const MethodConfig& config, const QAPair& pair, const EvalDeps& deps,
                      const EvalRecord* baseline) {
    EvalRecord record;
    record.query_id = pair.query_id;
    record.method = config.name;

    const Context context = build_context(*deps.store, pair.question, deps.n_chunks,
                                          *deps.embedder, {}, pair.query_id);
    const Reduction reduction = apply_method(config, pair, context, deps);

    CompletionRecord completion =
        deps.llm->complete(render_prompt(PromptKind::Qa, reduction.text, pair.question));
    completion.summary_tokens = reduction.summary_tokens;

    record.answer = completion.answer;
    record.completion = completion;
    record.tau = reduction.tau;
    record.rouge1 = rouge_n(record.answer, pair.reference_answer, 1);
    record.rouge2 = rouge_n(record.answer, pair.reference_answer, 2);
    record.rougeL = rouge_l(record.answer, pair.reference_answer);
    if (baseline != nullptr) {
        record.savings_vs_original = cost_savings(baseline->completion.total_tokens(),
                                                  record.completion.total_tokens());
    }
    return record;
}

ExperimentReport run_experiment(const std::vector<QAPair>& dataset,
                                const std::vector<MethodConfig>& configs,
                                const EvalDeps& deps, int concurrency) {
    if (dataset.empty()) {
        throw InvalidConfig("dataset is empty");
    }
    if (configs.empty()) {
        throw InvalidConfig("no methods configured");
    }

    std::vector<MethodConfig> effective = configs;
    const bool has_original =
        std::any_of(configs.begin(), configs.end(),
                    [](const MethodConfig& c) { return c.kind == MethodKind::Original; });
    if (!has_original) {
        effective.insert(effective.begin(), MethodConfig{});
    }
    std::size_t baseline_index = 0;
    for (std::size_t j = 0; j < effective.size(); ++j) {
        if (effective[j].kind == MethodKind::Original) {
            baseline_index = j;
            break;
        }
    }

    ExperimentReport report;
    report.records.resize(dataset.size() * effective.size());

    auto run_query = [&](std::size_t i) {
        const QAPair& pair = dataset[i];
        EvalRecord* slots = &report.records[i * effective.size()];
        auto run_one = [&](std::size_t j, const EvalRecord* baseline) {
            try {
                slots[j] = run_method(effective[j], pair, deps, baseline);
            } catch (const Error& e) {
                slots[j].query_id = pair.query_id;
                slots[j].method = effective[j].name;
                slots[j].failed = true;
                slots[j].error = e.what();
            }
        };
        run_one(baseline_index, nullptr);
        const EvalRecord* baseline =
            slots[baseline_index].failed ? nullptr : &slots[baseline_index];
        for (std::size_t j = 0; j < effective.size(); ++j) {
            if (j != baseline_index) {
                run_one(j, baseline);
            }
        }
    };

    if (concurrency <= 1) {
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            run_query(i);
        }
    } else {
        std::vector<std::future<void>> inflight;
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            if (inflight.size() >= static_cast<std::size_t>(concurrency)) {
                inflight.front().get();
                inflight.erase(inflight.begin());
            }
            inflight.push_back(std::async(std::launch::async, run_query, i));
        }
        for (std::future<void>& f : inflight) {
            f.get();
        }
    }

    // Per-method aggregation over successful records, in config order.
    const MethodAggregate* original_aggregate = nullptr;
    report.aggregates.reserve(effective.size());
    for (std::size_t j = 0; j < effective.size(); ++j) {
        MethodAggregate agg;
        agg.method = effective[j].name;
        double prompt = 0, summary = 0, completion = 0, total = 0;
        double r1 = 0, r2 = 0, rl = 0;
        long long n = 0;
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            const EvalRecord& rec = report.records[i * effective.size() + j];
            if (rec.failed) {
                ++agg.failures;
                continue;
            }
            ++n;
            prompt += rec.completion.prompt_tokens;
            summary += rec.completion.summary_tokens;
            completion += rec.completion.completion_tokens;
            total += rec.completion.total_tokens();
            r1 += rec.rouge1.f1;
            r2 += rec.rouge2.f1;
            rl += rec.rougeL.f1;
        }
        agg.queries = n;
        if (n > 0) {
            const double dn = static_cast<double>(n);
            agg.avg_prompt_tokens = std::llround(prompt / dn);
            agg.avg_summary_tokens = std::llround(summary / dn);
            agg.avg_completion_tokens = std::llround(completion / dn);
            agg.avg_total_tokens = std::llround(total / dn);
            agg.avg_total_exact = total / dn;
            agg.rouge1 = round_to(r1 / dn, 1e4);
            agg.rouge2 = round_to(r2 / dn, 1e4);
            agg.rougeL = round_to(rl / dn, 1e4);
        }
        report.aggregates.push_back(std::move(agg));
        if (j == baseline_index) {
            original_aggregate = &report.aggregates.back();
        }
    }
    if (original_aggregate != nullptr && original_aggregate->queries > 0) {
        for (MethodAggregate& agg : report.aggregates) {
            if (agg.queries > 0) {
                agg.cost_savings_pct =
                    cost_savings(original_aggregate->avg_total_exact, agg.avg_total_exact);
            }
        }
    }
    return report;
}

void write_report_json(const ExperimentReport& report, const std::filesystem::path& path) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json methods = nlohmann::ordered_json::array();
    for (const MethodAggregate& agg : report.aggregates) {
        methods.push_back({
            {"method", agg.method},
            {"queries", agg.queries},
            {"failures", agg.failures},
            {"avg_total_tokens", agg.avg_total_tokens},
            {"avg_prompt_tokens", agg.avg_prompt_tokens},
            {"avg_summary_tokens", agg.avg_summary_tokens},
            {"avg_completion_tokens", agg.avg_completion_tokens},
            {"rouge1", agg.rouge1},
            {"rouge2", agg.rouge2},
            {"rougeL", agg.rougeL},
            {"cost_savings_pct", agg.cost_savings_pct},
        });
    }
    doc["methods"] = std::move(methods);

    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const EvalRecord& rec : report.records) {
        nlohmann::ordered_json entry = {
            {"query_id", rec.query_id},
            {"method", rec.method},
        };
        if (rec.failed) {
            entry["error"] = rec.error;
        } else {
            entry["answer"] = rec.answer;
            entry["rouge1_f1"] = rec.rouge1.f1;
            entry["rouge2_f1"] = rec.rouge2.f1;
            entry["rougeL_f1"] = rec.rougeL.f1;
            entry["prompt_tokens"] = rec.completion.prompt_tokens;
            entry["summary_tokens"] = rec.completion.summary_tokens;
            entry["completion_tokens"] = rec.completion.completion_tokens;
            entry["total_tokens"] = rec.completion.total_tokens();
            entry["tau"] = rec.tau;
            entry["savings_vs_original"] = rec.savings_vs_original;
        }
        records.push_back(std::move(entry));
    }
    doc["records"] = std::move(records);

    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open report file for writing: " + path.string());
    }
    out << doc.dump(2) << "\n";
}

std::string format_report_table(const ExperimentReport& report) {
    std::ostringstream out;
    const char* fmt = "%-36s %9s %9s %9s %11s %9s %9s %9s %12s\n";
    char line[256];
    std::snprintf(line, sizeof(line), fmt, "Method", "AvgTotal", "AvgPrompt", "AvgSumm",
                  "AvgComplet", "ROUGE-1", "ROUGE-2", "ROUGE-L", "Savings(%)");
    out << line;
    out << std::string(120, '-') << "\n";
    for (const MethodAggregate& agg : report.aggregates) {
        std::snprintf(line, sizeof(line), "%-36s %9lld %9lld %9lld %11lld %9s %9s %9s %12s\n",
                      agg.method.c_str(), agg.avg_total_tokens, agg.avg_prompt_tokens,
                      agg.avg_summary_tokens, agg.avg_completion_tokens,
                      format_double(agg.rouge1, "%.4f").c_str(),
                      format_double(agg.rouge2, "%.4f").c_str(),
                      format_double(agg.rougeL, "%.4f").c_str(),
                      format_double(agg.cost_savings_pct, "%.2f").c_str());
        out << line;
    }
    return out.str();
}

std::vector<QAPair> load_qa_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open QA file: " + path.string());
    }
    std::vector<QAPair> pairs;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const nlohmann::json entry = nlohmann::json::parse(line);
            QAPair pair;
            pair.query_id = entry.at("query_id").get<std::string>();
            pair.doc_id = entry.at("doc_id").get<std::string>();
            pair.question = entry.at("question").get<std::string>();
            pair.reference_answer = entry.at("reference_answer").get<std::string>();
            if (pair.question.empty() || pair.reference_answer.empty()) {
                throw Error("question and reference_answer must be non-empty");
            }
            pairs.push_back(std::move(pair));
        } catch (const std::exception& e) {
            throw Error("malformed QA line " + std::to_string(line_no) + " in " +
                        path.string() + ": " + e.what());
        }
    }
    return pairs;
}

} // namespace leanctx
