#pragma once

#include <memory>
#include <string>

#include "leanctx/embedder.hpp"
#include "leanctx/llm.hpp"

namespace leanctx {

struct HttpGatewayConfig {
    std::string base_url;  // scheme://host[:port], the /v1/... path is appended
    std::string model;
    double timeout_s = 30.0;
    int max_concurrency = 4;
    int max_retries = 3;
    int backoff_ms = 100;
    std::string api_key_env = "LEANCTX_API_KEY";
};

namespace detail {
class HttpSession;
}

// OpenAI-compatible chat-completions client. Retries retryable failures
// (transport errors, 429, 5xx) with exponential backoff and caps in-flight
// requests at max_concurrency.
class HttpCompletionProvider final : public CompletionProvider {
public:
    explicit HttpCompletionProvider(HttpGatewayConfig config);
    ~HttpCompletionProvider() override;

    CompletionRecord complete(const std::string& prompt) override;

private:
    std::shared_ptr<detail::HttpSession> session_;
};

// OpenAI-compatible embeddings client; responses are re-normalized to unit norm.
class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(HttpGatewayConfig config, int dimension);
    ~HttpEmbedder() override;

    int dimension() const override { return dimension_; }

    std::vector<double> embed(std::string_view text) const override;

private:
    std::shared_ptr<detail::HttpSession> session_;
    int dimension_;
};

} // namespace leanctx
