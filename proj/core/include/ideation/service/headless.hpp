#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ideation/service/config.hpp"
#include "ideation/workflow/state.hpp"

namespace ideation::service {

/// Exit codes of a headless run.
enum HeadlessExit : int {
    kHeadlessOk = 0,
    kHeadlessFailed = 1,
    kHeadlessConfig = 2,
    kHeadlessFixtureMiss = 3,
    kHeadlessNoDecision = 4,
};

struct HeadlessResult {
    int exit_code = kHeadlessOk;
    std::string message;
    std::string session_id;
    workflow::SessionState state;
    std::filesystem::path log_path;
};

/// Runs a whole session without a researcher: gate decisions come from
/// `script` (matched to gates by kind, in order), agent answers from the
/// script's fixtures or the configured providers. Writes final_proposal.json,
/// verdicts.jsonl, state.json, session.log.jsonl and exports/ under `out`.
///
/// Script: {"workflow": "motivation-validation"|"full", "session_id",
/// "creator", "clock_start", "config": {engine overrides},
/// "fixtures": [...], "gates": [{"kind", "edits", "decision", "iterate"}]}.
HeadlessResult run_headless(const ServiceConfig& config, const nlohmann::json& proposal,
                            const nlohmann::json& script, const std::filesystem::path& out);

HeadlessResult run_headless_files(const ServiceConfig& config, const std::filesystem::path& proposal,
                                  const std::filesystem::path& script, const std::filesystem::path& out);

}  // namespace ideation::service
