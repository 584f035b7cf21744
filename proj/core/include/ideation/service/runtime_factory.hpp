#pragma once

#include <memory>
#include <vector>

#include "ideation/agents/runtime.hpp"
#include "ideation/corpus/embedding.hpp"
#include "ideation/service/config.hpp"
#include "ideation/service/scripted_provider.hpp"

namespace ideation::service {

struct Providers {
    std::shared_ptr<corpus::EmbeddingProvider> embedder;
    std::shared_ptr<agents::AgentRuntime> agents;
    std::vector<std::shared_ptr<ScriptedProvider>> scripted;
};

/// Throws Config when a credential variable is missing.
std::shared_ptr<corpus::EmbeddingProvider> make_embedder(const EmbeddingConfig& config);

/// Builds the embedder and registers every configured chat provider. When a
/// persona names no provider it falls back to the first one configured.
Providers make_providers(const ServiceConfig& config);

}  // namespace ideation::service
