#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ideation/session/event.hpp"

namespace ideation::session {

enum class ExportTask { MotivationRetrieval, ProposalRewrite, ProblemRetrieval, MethodSynthesis };

std::string_view to_string(ExportTask t) noexcept;
/// Throws InvalidArgument for unknown names.
ExportTask export_task_from_string(std::string_view s);

struct ExportResult {
    std::vector<nlohmann::json> records;  // {task, session_id, input, agent_output, validated}
    std::optional<std::string> notice;
};

/// Builds (input, agent output, researcher-validated output) triples from a
/// finished session's log. Unfinished or unreadable logs yield no records
/// and a notice.
ExportResult export_dataset(std::span<const LogEvent> events, ExportTask task);

void write_jsonl(std::ostream& out, const std::vector<nlohmann::json>& records);

}  // namespace ideation::session
