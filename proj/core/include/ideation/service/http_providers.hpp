#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "ideation/agents/runtime.hpp"
#include "ideation/corpus/embedding.hpp"

namespace ideation::service {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // begins with '/', may be "/"
};

/// Splits an http(s) URL; throws Config for anything else.
Endpoint parse_endpoint(const std::string& url);

/// OpenAI-compatible chat completions endpoint. Connection failures and 429
/// or 5xx answers are reported as retryable errors, timeouts as Timeout,
/// other 4xx answers and malformed bodies as ProviderRejected.
class OpenAiChatProvider final : public agents::LlmProvider {
public:
    OpenAiChatProvider(std::string id, const std::string& endpoint, std::string token,
                       std::chrono::milliseconds timeout);

    std::string id() const override { return id_; }
    agents::ChatResponse chat(const agents::ChatRequest& request) override;
    bool reachable() override;

private:
    std::string id_;
    Endpoint endpoint_;
    std::string token_;
    std::chrono::milliseconds timeout_;
};

/// Remote document embedder: POST {"model", "inputs": [{"title","abstract"}]}
/// answered by {"vectors": [[...], ...]}.
class HttpEmbeddingProvider final : public corpus::EmbeddingProvider {
public:
    HttpEmbeddingProvider(const std::string& endpoint, std::string model, std::string token, std::size_t dimension,
                          std::chrono::milliseconds timeout);

    std::string model_id() const override { return model_; }
    std::size_t dimension() const override { return dimension_; }
    std::vector<std::vector<float>> embed(std::span<const corpus::EmbeddingInput> inputs) override;
    bool reachable() override;

private:
    Endpoint endpoint_;
    std::string model_;
    std::string token_;
    std::size_t dimension_;
    std::chrono::milliseconds timeout_;
};

}  // namespace ideation::service
