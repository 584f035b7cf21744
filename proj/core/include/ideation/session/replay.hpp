#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "ideation/session/store.hpp"
#include "ideation/workflow/state.hpp"

namespace ideation::session {

struct ReplayResult {
    workflow::SessionState state;  // fold of the valid prefix
    std::size_t applied = 0;
    std::optional<LogDiagnostic> diagnostic;  // first rejected entry, if any
};

/// Folds events through the workflow reducer, stopping at the first one it
/// rejects. Never throws for log content.
ReplayResult replay_events(std::span<const LogEvent> events);

ReplayResult replay_file(const std::filesystem::path& log_path);

}  // namespace ideation::session
