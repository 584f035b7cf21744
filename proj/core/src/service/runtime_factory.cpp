#include "ideation/service/runtime_factory.hpp"

#include "ideation/error.hpp"
#include "ideation/service/hash_embedding.hpp"
#include "ideation/service/http_providers.hpp"

namespace ideation::service {

std::shared_ptr<corpus::EmbeddingProvider> make_embedder(const EmbeddingConfig& c) {
    if (c.kind == "hash") return std::make_shared<HashEmbeddingProvider>(c.dimension);
    if (c.kind == "http") {
        std::string token = c.token_env.empty() ? std::string() : require_env(c.token_env, "embedding endpoint token");
        return std::make_shared<HttpEmbeddingProvider>(c.endpoint, c.model.empty() ? c.endpoint : c.model,
                                                       std::move(token), c.dimension,
                                                       std::chrono::milliseconds(c.timeout_ms));
    }
    fail(ErrorCode::Config, "embedding.kind: unknown kind '" + c.kind + "'");
}

Providers make_providers(const ServiceConfig& config) {
    Providers out;
    out.embedder = make_embedder(config.embedding);
    out.agents = std::make_shared<agents::AgentRuntime>();
    out.agents->retry_policy() = config.retry;
    for (const auto& p : config.providers) {
        std::shared_ptr<agents::LlmProvider> provider;
        if (p.kind == "scripted") {
            auto sp = std::make_shared<ScriptedProvider>(p.id, load_fixtures(p.fixtures));
            out.scripted.push_back(sp);
            provider = sp;
        } else if (p.kind == "openai-chat") {
            std::string token = p.token_env.empty() ? std::string()
                                                    : require_env(p.token_env, "API token for provider " + p.id);
            provider = std::make_shared<OpenAiChatProvider>(p.id, p.endpoint, std::move(token),
                                                            std::chrono::milliseconds(p.timeout_ms));
        } else {
            fail(ErrorCode::Config, "provider " + p.id + ": unknown kind '" + p.kind + "'");
        }
        out.agents->register_provider(std::move(provider), p.max_concurrency);
    }
    if (!config.providers.empty()) {
        for (auto pc : {config.colleague, config.mentor}) {
            if (pc.provider_id.empty()) pc.provider_id = config.providers.front().id;
            out.agents->configure(pc);
        }
    }
    return out;
}

}  // namespace ideation::service
