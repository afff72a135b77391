#include "leanctx/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "leanctx/errors.hpp"

namespace leanctx {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = object.begin(); it != object.end(); ++it) {
        if (allowed.count(it.key()) == 0) {
            throw InvalidConfig("unknown key '" + it.key() + "' in " + where);
        }
    }
}

void parse_http(const json& object, const std::string& where, HttpGatewayConfig& http) {
    reject_unknown_keys(object,
                        {"base_url", "model", "timeout_s", "max_concurrency",
                         "max_retries", "backoff_ms"},
                        where);
    http.base_url = object.value("base_url", http.base_url);
    http.model = object.value("model", http.model);
    http.timeout_s = object.value("timeout_s", http.timeout_s);
    http.max_concurrency = object.value("max_concurrency", http.max_concurrency);
    http.max_retries = object.value("max_retries", http.max_retries);
    http.backoff_ms = object.value("backoff_ms", http.backoff_ms);
    if (http.base_url.empty()) {
        throw InvalidConfig(where + ".base_url must be set");
    }
    if (http.timeout_s <= 0 || http.max_concurrency <= 0 || http.max_retries < 0 ||
        http.backoff_ms < 0) {
        throw InvalidConfig(where + " has out-of-range values");
    }
}

} // namespace

AppConfig default_config() { return AppConfig{}; }

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidConfig("cannot open config file: " + path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InvalidConfig("config is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) {
        throw InvalidConfig("config root must be an object");
    }

    AppConfig config;
    reject_unknown_keys(doc, {"store", "embedder", "llm", "reducer", "rl", "retrieval"},
                        "config");

    if (doc.contains("store")) {
        const json& store = doc["store"];
        reject_unknown_keys(store, {"chunk_size", "chunk_overlap", "unit"}, "store");
        config.store.chunk_size = store.value("chunk_size", config.store.chunk_size);
        config.store.chunk_overlap =
            store.value("chunk_overlap", config.store.chunk_overlap);
        const std::string unit =
            store.value("unit", std::string(config.store.unit == ChunkUnit::Tokens
                                                ? "tokens"
                                                : "characters"));
        if (unit == "tokens") {
            config.store.unit = ChunkUnit::Tokens;
        } else if (unit == "characters") {
            config.store.unit = ChunkUnit::Characters;
        } else {
            throw InvalidConfig("store.unit must be 'tokens' or 'characters'");
        }
        if (config.store.chunk_size <= 0 || config.store.chunk_overlap < 0 ||
            config.store.chunk_overlap >= config.store.chunk_size) {
            throw InvalidConfig("store chunking values out of range");
        }
    }

    if (doc.contains("embedder")) {
        const json& embedder = doc["embedder"];
        reject_unknown_keys(embedder, {"kind", "dimension", "http"}, "embedder");
        config.embedder.kind = embedder.value("kind", config.embedder.kind);
        config.embedder.dimension = embedder.value("dimension", config.embedder.dimension);
        if (config.embedder.kind == "http") {
            if (!embedder.contains("http")) {
                throw InvalidConfig("embedder.kind=http requires an http section");
            }
            parse_http(embedder["http"], "embedder.http", config.embedder.http);
        } else if (config.embedder.kind != "hash") {
            throw InvalidConfig("embedder.kind must be 'hash' or 'http'");
        }
        if (config.embedder.dimension <= 0) {
            throw InvalidConfig("embedder.dimension must be positive");
        }
    }

    if (doc.contains("llm")) {
        const json& llm = doc["llm"];
        reject_unknown_keys(llm, {"kind", "http"}, "llm");
        config.llm.kind = llm.value("kind", config.llm.kind);
        if (config.llm.kind == "http") {
            if (!llm.contains("http")) {
                throw InvalidConfig("llm.kind=http requires an http section");
            }
            parse_http(llm["http"], "llm.http", config.llm.http);
        } else if (config.llm.kind != "mock") {
            throw InvalidConfig("llm.kind must be 'mock' or 'http'");
        }
    }

    if (doc.contains("reducer")) {
        const json& reducer = doc["reducer"];
        reject_unknown_keys(reducer, {"rate"}, "reducer");
        config.reducer.rate = reducer.value("rate", config.reducer.rate);
        if (config.reducer.rate < 0.0 || config.reducer.rate >= 1.0) {
            throw InvalidConfig("reducer.rate must lie in [0, 1)");
        }
    }

    if (doc.contains("rl")) {
        const json& rl = doc["rl"];
        reject_unknown_keys(rl, {"thresholds", "clusters", "alpha", "seed", "state_variant"},
                            "rl");
        if (rl.contains("thresholds")) {
            config.rl.thresholds = rl["thresholds"].get<std::vector<double>>();
        }
        config.rl.clusters = rl.value("clusters", config.rl.clusters);
        config.rl.alpha = rl.value("alpha", config.rl.alpha);
        config.rl.seed = rl.value("seed", config.rl.seed);
        config.rl.state_variant = rl.value("state_variant", config.rl.state_variant);
        if (config.rl.thresholds.size() < 2) {
            throw InvalidConfig("rl.thresholds needs at least two entries");
        }
        for (std::size_t i = 0; i < config.rl.thresholds.size(); ++i) {
            const double t = config.rl.thresholds[i];
            if (t < 0.0 || t > 0.4 ||
                (i > 0 && t <= config.rl.thresholds[i - 1])) {
                throw InvalidConfig(
                    "rl.thresholds must be strictly increasing within [0, 0.4]");
            }
        }
        if (config.rl.clusters <= 0) {
            throw InvalidConfig("rl.clusters must be positive");
        }
        if (config.rl.alpha < 0.0 || config.rl.alpha > 1.0) {
            throw InvalidConfig("rl.alpha must lie in [0, 1]");
        }
        state_variant_from_name(config.rl.state_variant);
    }

    if (doc.contains("retrieval")) {
        const json& retrieval = doc["retrieval"];
        reject_unknown_keys(retrieval, {"n_chunks", "concurrency"}, "retrieval");
        config.retrieval.n_chunks = retrieval.value("n_chunks", config.retrieval.n_chunks);
        config.retrieval.concurrency =
            retrieval.value("concurrency", config.retrieval.concurrency);
        if (config.retrieval.n_chunks <= 0 || config.retrieval.concurrency <= 0) {
            throw InvalidConfig("retrieval values must be positive");
        }
    }

    return config;
}

} // namespace leanctx
