#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ideation/agents/runtime.hpp"
#include "ideation/workflow/engine.hpp"

namespace ideation::service {

struct EmbeddingConfig {
    std::string kind = "hash";  // "hash" | "http"
    std::size_t dimension = 256;
    std::string endpoint;
    std::string model;
    std::string token_env;
    int timeout_ms = 30000;
};

struct ProviderConfig {
    std::string id;
    std::string kind;  // "openai-chat" | "scripted"
    std::string endpoint;
    std::string token_env;
    int timeout_ms = 60000;
    std::size_t max_concurrency = 4;
    std::filesystem::path fixtures;  // scripted only
};

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string token_env;  // empty: no authentication
};

struct ServiceConfig {
    std::filesystem::path corpus;
    std::optional<std::filesystem::path> session_dir;
    bool durable = true;
    workflow::EngineConfig engine;
    EmbeddingConfig embedding;
    std::vector<ProviderConfig> providers;
    agents::PersonaConfig colleague{agents::Persona::Colleague, {}, {}, 0.0, 1024};
    agents::PersonaConfig mentor{agents::Persona::Mentor, {}, {}, 0.0, 1024};
    agents::RetryPolicy retry;
    ServerConfig server;
};

/// Parses a config document. Relative paths resolve against `base_dir`.
/// Collects every problem and throws one Config error listing each as
/// "field: message".
ServiceConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
ServiceConfig load_config(const std::filesystem::path& path);

/// Value of an environment variable holding a credential; throws Config
/// naming the variable when it is unset or empty.
std::string require_env(const std::string& variable, const std::string& purpose);

}  // namespace ideation::service
