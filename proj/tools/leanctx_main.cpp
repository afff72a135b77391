#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "leanctx/commands.hpp"
#include "leanctx/errors.hpp"

namespace {

leanctx::AppConfig resolve_config(const std::string& config_path) {
    if (config_path.empty()) {
        return leanctx::default_config();
    }
    return leanctx::load_config(config_path);
}

} // namespace

namespace {

int run(int argc, char** argv) {
    CLI::App app{"Query-aware context reduction for retrieval-augmented QA"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "Path to a JSON config file")
        ->check(CLI::ExistingFile);

    std::string store_path;
    std::string agent_path;
    std::string report_path = "report.json";
    std::string methods = "original";
    std::string corpus_path;
    std::string qa_path;
    std::string question;
    std::optional<int> n_chunks;
    std::optional<std::uint64_t> seed;

    CLI::App* ingest = app.add_subcommand("ingest", "Split, embed, and index a corpus");
    ingest->add_option("corpus", corpus_path, "Corpus JSONL (doc_id, text)")->required();
    ingest->add_option("--store", store_path, "Output store snapshot path")->required();

    CLI::App* train = app.add_subcommand("train", "Train the adaptive-k agent");
    train->add_option("qa", qa_path, "Training QA JSONL")->required();
    train->add_option("--store", store_path, "Store snapshot path")->required();
    train->add_option("--agent", agent_path, "Output agent path")->required();
    train->add_option("--seed", seed, "K-means seed override");

    CLI::App* ask = app.add_subcommand("ask", "Answer one question");
    ask->add_option("question", question, "The question")->required();
    ask->add_option("--store", store_path, "Store snapshot path")->required();
    ask->add_option("--agent", agent_path, "Trained agent path")->required();
    ask->add_option("--n-chunks", n_chunks, "Retrieval chunk count override");

    CLI::App* eval = app.add_subcommand("eval", "Run a method comparison");
    eval->add_option("qa", qa_path, "Test QA JSONL")->required();
    eval->add_option("--store", store_path, "Store snapshot path")->required();
    eval->add_option("--agent", agent_path, "Trained agent path (adaptive methods)");
    eval->add_option("--methods", methods, "Comma-separated method list");
    eval->add_option("--report", report_path, "Report JSON output path");
    eval->add_option("--n-chunks", n_chunks, "Retrieval chunk count override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return leanctx::kExitUsage;
    }

    leanctx::AppConfig config;
    try {
        config = resolve_config(config_path);
    } catch (const leanctx::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return leanctx::kExitUsage;
    }

    if (ingest->parsed()) {
        return leanctx::cmd_ingest(config, corpus_path, store_path, std::cout, std::cerr);
    }
    if (train->parsed()) {
        return leanctx::cmd_train(config, store_path, qa_path, agent_path, seed, std::cout,
                                  std::cerr);
    }
    if (ask->parsed()) {
        return leanctx::cmd_ask(config, store_path, agent_path, question, n_chunks,
                                std::cout, std::cerr);
    }
    if (eval->parsed()) {
        std::optional<std::filesystem::path> agent;
        if (!agent_path.empty()) {
            agent = agent_path;
        }
        return leanctx::cmd_eval(config, store_path, qa_path, methods, report_path, agent,
                                 n_chunks, std::cout, std::cerr);
    }
    return leanctx::kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return leanctx::kExitRuntime;
    }
}
