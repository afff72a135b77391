#include "leanctx/commands.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "leanctx/errors.hpp"

namespace leanctx {

Runtime::Runtime(AppConfig config_in) : config(std::move(config_in)) {
    if (config.embedder.kind == "http") {
        embedder = std::make_unique<HttpEmbedder>(config.embedder.http,
                                                  config.embedder.dimension);
    } else {
        embedder = std::make_unique<HashEmbedder>(config.embedder.dimension);
    }
    if (config.llm.kind == "http") {
        llm = std::make_unique<HttpCompletionProvider>(config.llm.http);
    } else {
        llm = std::make_unique<MockProvider>();
    }
}

void Runtime::load_store(const std::filesystem::path& path) {
    store = std::make_unique<VectorStore>(VectorStore::load(path));
    if (store->dimension() != config.embedder.dimension) {
        throw DimensionMismatch("store dimension " + std::to_string(store->dimension()) +
                                " does not match embedder dimension " +
                                std::to_string(config.embedder.dimension));
    }
    for (const Chunk& chunk : store->chunks()) {
        self_info.add_text(chunk.text, tokenizer);
    }
}

std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open corpus file: " + path.string());
    }
    std::vector<Document> docs;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const nlohmann::json entry = nlohmann::json::parse(line);
            Document doc;
            doc.doc_id = entry.at("doc_id").get<std::string>();
            doc.text = entry.at("text").get<std::string>();
            docs.push_back(std::move(doc));
        } catch (const std::exception& e) {
            throw Error("malformed corpus line " + std::to_string(line_no) + " in " +
                        path.string() + ": " + e.what());
        }
    }
    return docs;
}

int cmd_ingest(const AppConfig& config, const std::filesystem::path& corpus_path,
               const std::filesystem::path& store_out, std::ostream& out,
               std::ostream& err) {
    try {
        Runtime runtime(config);
        const std::vector<Document> docs = load_corpus_jsonl(corpus_path);
        if (docs.empty()) {
            err << "corpus is empty: " << corpus_path.string() << "\n";
            return kExitRuntime;
        }
        std::set<std::string> seen;
        for (const Document& doc : docs) {
            if (!seen.insert(doc.doc_id).second) {
                err << "duplicate doc_id in corpus: " << doc.doc_id << "\n";
                return kExitRuntime;
            }
        }
        VectorStore store(config.embedder.dimension, config.store);
        long long chunks = 0;
        for (const Document& doc : docs) {
            chunks += store.ingest(doc, *runtime.embedder, runtime.tokenizer);
        }
        store.save(store_out);
        out << "ingested " << docs.size() << " documents into " << chunks << " chunks ("
            << store_out.string() << ")\n";
        return kExitOk;
    } catch (const InvalidConfig& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "ingest failed: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_train(const AppConfig& config, const std::filesystem::path& store_path,
              const std::filesystem::path& qa_train_path,
              const std::filesystem::path& agent_out,
              std::optional<std::uint64_t> seed_override, std::ostream& out,
              std::ostream& err) {
    try {
        Runtime runtime(config);
        runtime.load_store(store_path);

        const std::vector<QAPair> pairs = load_qa_jsonl(qa_train_path);
        if (pairs.empty()) {
            err << "training file has no QA pairs: " << qa_train_path.string() << "\n";
            return kExitRuntime;
        }

        std::vector<TrainingSample> samples;
        samples.reserve(pairs.size());
        for (const QAPair& pair : pairs) {
            TrainingSample sample;
            sample.query = pair.question;
            sample.reference_answer = pair.reference_answer;
            sample.context =
                build_context(*runtime.store, pair.question, config.retrieval.n_chunks,
                              *runtime.embedder, {}, pair.query_id);
            samples.push_back(std::move(sample));
        }

        RLAgent agent = make_agent(state_variant_from_name(config.rl.state_variant),
                                   config.rl.clusters, config.rl.thresholds,
                                   config.rl.alpha, config.embedder.dimension);
        TrainOptions options;
        options.reduction_rate = config.reducer.rate;
        options.kmeans_seed = seed_override.value_or(config.rl.seed);
        const TrainReport report = train(agent, samples, *runtime.llm, *runtime.embedder,
                                         runtime.tokenizer, runtime.self_info, options);

        out << "samples: " << report.samples << "\n";
        out << "actions: " << report.actions << "\n";
        out << "llm_calls: " << report.llm_calls << "\n";
        out << "state_visits:";
        for (const long long v : report.state_visits) {
            out << " " << v;
        }
        out << "\n";
        if (!report.completed) {
            err << "training aborted: " << report.error << "\n";
            return kExitRuntime;
        }
        save_agent(agent, agent_out);
        out << "agent written to " << agent_out.string() << "\n";
        return kExitOk;
    } catch (const InvalidConfig& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "train failed: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_ask(const AppConfig& config, const std::filesystem::path& store_path,
            const std::filesystem::path& agent_path, const std::string& question,
            std::optional<int> n_chunks_override, std::ostream& out, std::ostream& err) {
    try {
        Runtime runtime(config);
        runtime.load_store(store_path);
        const RLAgent agent = load_agent(agent_path);
        if (agent.embedder_dimension != config.embedder.dimension) {
            throw DimensionMismatch("agent embedder dimension " +
                                    std::to_string(agent.embedder_dimension) +
                                    " does not match configured dimension " +
                                    std::to_string(config.embedder.dimension));
        }

        const int n = n_chunks_override.value_or(config.retrieval.n_chunks);
        const Context context =
            build_context(*runtime.store, question, n, *runtime.embedder);
        const InferenceResult result =
            infer(agent, question, context, *runtime.llm, *runtime.embedder,
                  runtime.tokenizer, runtime.self_info, config.reducer.rate);

        out << "answer: " << result.answer << "\n";
        out << "theta: " << result.theta << "\n";
        out << "state: " << result.state << "\n";
        out << "original_tokens: " << result.reduced.original_tokens << "\n";
        out << "reduced_tokens: " << result.reduced.reduced_tokens << "\n";
        out << "tau: " << result.reduced.tau << "\n";
        out << "prompt_tokens: " << result.completion.prompt_tokens << "\n";
        out << "completion_tokens: " << result.completion.completion_tokens << "\n";
        return kExitOk;
    } catch (const InvalidConfig& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "ask failed: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_eval(const AppConfig& config, const std::filesystem::path& store_path,
             const std::filesystem::path& qa_test_path, const std::string& methods_csv,
             const std::filesystem::path& report_out,
             const std::optional<std::filesystem::path>& agent_path,
             std::optional<int> n_chunks_override, std::ostream& out, std::ostream& err) {
    std::vector<MethodConfig> configs;
    try {
        std::stringstream splitter(methods_csv);
        std::string item;
        while (std::getline(splitter, item, ',')) {
            if (!item.empty()) {
                configs.push_back(parse_method(item));
            }
        }
        if (configs.empty()) {
            throw InvalidConfig("no methods given");
        }
    } catch (const InvalidConfig& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        Runtime runtime(config);
        runtime.load_store(store_path);

        RLAgent agent;
        const bool needs_agent = std::any_of(
            configs.begin(), configs.end(), [](const MethodConfig& c) {
                return c.kind == MethodKind::AdaptiveK ||
                       (c.kind == MethodKind::Cascade && c.cascade_adaptive);
            });
        if (needs_agent) {
            if (!agent_path.has_value()) {
                err << "usage error: adaptive methods need --agent\n";
                return kExitUsage;
            }
            agent = load_agent(*agent_path);
            if (agent.embedder_dimension != config.embedder.dimension) {
                throw DimensionMismatch("agent embedder dimension does not match config");
            }
        }

        const std::vector<QAPair> pairs = load_qa_jsonl(qa_test_path);
        if (pairs.empty()) {
            err << "QA file has no pairs: " << qa_test_path.string() << "\n";
            return kExitRuntime;
        }

        EvalDeps deps;
        deps.store = runtime.store.get();
        deps.embedder = runtime.embedder.get();
        deps.tokenizer = &runtime.tokenizer;
        deps.self_info = &runtime.self_info;
        deps.llm = runtime.llm.get();
        deps.agent = needs_agent ? &agent : nullptr;
        deps.n_chunks = n_chunks_override.value_or(config.retrieval.n_chunks);
        deps.reduction_rate = config.reducer.rate;

        const ExperimentReport report =
            run_experiment(pairs, configs, deps, config.retrieval.concurrency);

        write_report_json(report, report_out);
        std::filesystem::path text_path = report_out;
        text_path.replace_extension(".txt");
        const std::string table = format_report_table(report);
        {
            std::ofstream text_out(text_path);
            if (!text_out) {
                throw Error("cannot open report file for writing: " + text_path.string());
            }
            text_out << table;
        }
        out << table;
        out << "reports written to " << report_out.string() << " and "
            << text_path.string() << "\n";
        return kExitOk;
    } catch (const InvalidConfig& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "eval failed: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace leanctx
