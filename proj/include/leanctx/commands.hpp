#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "leanctx/config.hpp"
#include "leanctx/eval.hpp"

namespace leanctx {

// Exit codes shared by the CLI: 0 success, 1 runtime failure, 2 usage/config.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Component stack assembled from an AppConfig. The self-information model is
// built from the store's chunks after load_store().
struct Runtime {
    explicit Runtime(AppConfig config);

    void load_store(const std::filesystem::path& path);

    AppConfig config;
    RuleTokenizer tokenizer;
    std::unique_ptr<Embedder> embedder;
    std::unique_ptr<CompletionProvider> llm;
    std::unique_ptr<VectorStore> store;
    UnigramModel self_info;
};

int cmd_ingest(const AppConfig& config, const std::filesystem::path& corpus_path,
               const std::filesystem::path& store_out, std::ostream& out,
               std::ostream& err);

int cmd_train(const AppConfig& config, const std::filesystem::path& store_path,
              const std::filesystem::path& qa_train_path,
              const std::filesystem::path& agent_out,
              std::optional<std::uint64_t> seed_override, std::ostream& out,
              std::ostream& err);

int cmd_ask(const AppConfig& config, const std::filesystem::path& store_path,
            const std::filesystem::path& agent_path, const std::string& question,
            std::optional<int> n_chunks_override, std::ostream& out, std::ostream& err);

int cmd_eval(const AppConfig& config, const std::filesystem::path& store_path,
             const std::filesystem::path& qa_test_path, const std::string& methods_csv,
             const std::filesystem::path& report_out,
             const std::optional<std::filesystem::path>& agent_path,
             std::optional<int> n_chunks_override, std::ostream& out, std::ostream& err);

std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path);

} // namespace leanctx
