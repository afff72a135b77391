#include "leanctx/http_gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "leanctx/errors.hpp"
#include "leanctx/vecmath.hpp"

namespace leanctx {

namespace detail {

class HttpSession {
public:
    explicit HttpSession(HttpGatewayConfig config)
        : config_(std::move(config)), in_flight_(0) {
        if (config_.base_url.empty()) {
            throw InvalidConfig("http gateway base_url must be set");
        }
        if (const char* key = std::getenv(config_.api_key_env.c_str())) {
            api_key_ = key;
        }
    }

    nlohmann::json post_json(const std::string& path, const nlohmann::json& body) {
        Slot slot(*this);
        std::string payload = body.dump();

        int attempt = 0;
        while (true) {
            httplib::Client client(config_.base_url);
            client.set_connection_timeout(std::chrono::milliseconds(
                static_cast<int>(config_.timeout_s * 1000)));
            client.set_read_timeout(
                std::chrono::milliseconds(static_cast<int>(config_.timeout_s * 1000)));
            httplib::Headers headers;
            if (!api_key_.empty()) {
                headers.emplace("Authorization", "Bearer " + api_key_);
            }

            auto result = client.Post(path, headers, payload, "application/json");
            if (result) {
                const int status = result->status;
                if (status >= 200 && status < 300) {
                    try {
                        return nlohmann::json::parse(result->body);
                    } catch (const nlohmann::json::exception& e) {
                        throw ProviderError(
                            std::string("unparseable provider response: ") + e.what(),
                            false, status);
                    }
                }
                if (is_context_too_large(status, result->body)) {
                    throw ContextTooLarge("provider rejected prompt as too large: " +
                                          result->body);
                }
                const bool retryable = status == 429 || status >= 500;
                if (!retryable || attempt >= config_.max_retries) {
                    throw ProviderError("provider returned status " +
                                            std::to_string(status) + ": " + result->body,
                                        retryable, status);
                }
            } else if (attempt >= config_.max_retries) {
                throw ProviderError("transport failure talking to " + config_.base_url +
                                        ": " + httplib::to_string(result.error()),
                                    true, 0);
            }
            const long long backoff =
                static_cast<long long>(config_.backoff_ms) << std::min(attempt, 16);
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            ++attempt;
        }
    }

    const HttpGatewayConfig& config() const { return config_; }

private:
    static bool is_context_too_large(int status, const std::string& body) {
        if (status != 400 && status != 413) {
            return false;
        }
        return body.find("context_length_exceeded") != std::string::npos ||
               body.find("maximum context length") != std::string::npos;
    }

    // RAII guard for the in-flight request cap.
    struct Slot {
        explicit Slot(HttpSession& session) : session_(session) {
            std::unique_lock lock(session_.mutex_);
            session_.released_.wait(lock, [&] {
                return session_.in_flight_ < session_.config_.max_concurrency;
            });
            ++session_.in_flight_;
        }
        ~Slot() {
            {
                std::lock_guard lock(session_.mutex_);
                --session_.in_flight_;
            }
            session_.released_.notify_one();
        }
        HttpSession& session_;
    };

    HttpGatewayConfig config_;
    std::string api_key_;
    std::mutex mutex_;
    std::condition_variable released_;
    int in_flight_;
};

} // namespace detail

HttpCompletionProvider::HttpCompletionProvider(HttpGatewayConfig config)
    : session_(std::make_shared<detail::HttpSession>(std::move(config))) {}

HttpCompletionProvider::~HttpCompletionProvider() = default;

CompletionRecord HttpCompletionProvider::complete(const std::string& prompt) {
    if (prompt.empty()) {
        throw EmptyInput("prompt is empty");
    }
    nlohmann::json body = {
        {"model", session_->config().model},
        {"messages", nlohmann::json::array({
                         {{"role", "user"}, {"content", prompt}},
                     })},
    };
    const nlohmann::json response = session_->post_json("/v1/chat/completions", body);

    CompletionRecord record;
    try {
        record.answer =
            response.at("choices").at(0).at("message").at("content").get<std::string>();
        if (response.contains("usage")) {
            const auto& usage = response["usage"];
            record.prompt_tokens = usage.value("prompt_tokens", 0);
            record.completion_tokens = usage.value("completion_tokens", 0);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("unexpected completion schema: ") + e.what(), false,
                            0);
    }
    return record;
}

HttpEmbedder::HttpEmbedder(HttpGatewayConfig config, int dimension)
    : session_(std::make_shared<detail::HttpSession>(std::move(config))),
      dimension_(dimension) {
    if (dimension <= 0) {
        throw InvalidConfig("embedder dimension must be positive");
    }
}

HttpEmbedder::~HttpEmbedder() = default;

std::vector<double> HttpEmbedder::embed(std::string_view text) const {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && is_space_char(static_cast<unsigned char>(text[b]))) {
        ++b;
    }
    while (e > b && is_space_char(static_cast<unsigned char>(text[e - 1]))) {
        --e;
    }
    if (b == e) {
        throw EmptyInput("cannot embed blank text");
    }

    nlohmann::json body = {
        {"model", session_->config().model},
        {"input", std::string(text)},
    };
    const nlohmann::json response = session_->post_json("/v1/embeddings", body);

    std::vector<double> embedding;
    try {
        embedding = response.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e2) {
        throw ProviderError(std::string("unexpected embedding schema: ") + e2.what(), false,
                            0);
    }
    if (static_cast<int>(embedding.size()) != dimension_) {
        throw DimensionMismatch("provider returned dimension " +
                                std::to_string(embedding.size()) + ", expected " +
                                std::to_string(dimension_));
    }
    const double norm = l2_norm(embedding);
    if (norm == 0.0) {
        throw ProviderError("provider returned a zero embedding", false, 0);
    }
    for (double& x : embedding) {
        x /= norm;
    }
    return embedding;
}

} // namespace leanctx
