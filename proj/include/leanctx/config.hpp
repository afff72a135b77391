#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "leanctx/corpus.hpp"
#include "leanctx/http_gateway.hpp"
#include "leanctx/rl_agent.hpp"

namespace leanctx {

struct EmbedderConfig {
    std::string kind = "hash"; // hash | http
    int dimension = 64;
    HttpGatewayConfig http;
};

struct LlmConfig {
    std::string kind = "mock"; // mock | http
    HttpGatewayConfig http;
};

struct ReducerConfig {
    double rate = 0.8;
};

struct RlConfig {
    std::vector<double> thresholds = {0.0,  0.05, 0.10, 0.15, 0.20,
                                      0.25, 0.30, 0.35, 0.40};
    int clusters = 8;
    double alpha = 0.5;
    std::uint64_t seed = 7;
    std::string state_variant = "subtract";
};

struct RetrievalConfig {
    int n_chunks = 4;
    int concurrency = 1;
};

struct AppConfig {
    StoreConfig store;
    EmbedderConfig embedder;
    LlmConfig llm;
    ReducerConfig reducer;
    RlConfig rl;
    RetrievalConfig retrieval;
};

// Loads and validates a config file; unknown keys are rejected so typos fail
// loudly. Throws InvalidConfig on every validation problem.
AppConfig load_config(const std::filesystem::path& path);

AppConfig default_config();

} // namespace leanctx
