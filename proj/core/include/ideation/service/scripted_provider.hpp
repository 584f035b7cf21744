#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ideation/agents/runtime.hpp"
#include "ideation/error.hpp"

namespace ideation::service {

/// One canned answer. A fixture applies to a call when its template matches
/// (or is unset) and every `contains` string and the `match` regex occur in
/// the rendered messages. Responses are served in order; the last repeats.
/// `fail_first` calls fail with `error` before responses are served; with
/// no responses every call fails.
struct Fixture {
    std::optional<std::string> template_id;
    std::vector<std::string> contains;
    std::optional<std::string> match;
    std::vector<std::string> responses;
    std::optional<ErrorCode> error;
    std::size_t fail_first = 0;
};

Fixture fixture_from_json(const nlohmann::json& j);
std::vector<Fixture> fixtures_from_json(const nlohmann::json& j);
std::vector<Fixture> load_fixtures(const std::filesystem::path& path);

/// Deterministic provider for tests and headless runs. Fixtures are tried
/// in order; an unmatched call throws FixtureMiss.
class ScriptedProvider final : public agents::LlmProvider {
public:
    ScriptedProvider(std::string id, std::vector<Fixture> fixtures);

    std::string id() const override { return id_; }
    agents::ChatResponse chat(const agents::ChatRequest& request) override;

    std::size_t calls() const;
    std::size_t misses() const;
    std::vector<std::size_t> hits() const;  // per fixture

private:
    struct Entry {
        Fixture fixture;
        std::optional<std::regex> regex;
        std::size_t served = 0;
    };

    std::string id_;
    mutable std::mutex mutex_;
    std::vector<Entry> entries_;
    std::size_t calls_ = 0;
    std::size_t misses_ = 0;
};

}  // namespace ideation::service
