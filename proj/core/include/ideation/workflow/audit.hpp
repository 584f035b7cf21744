#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ideation/session/event.hpp"

namespace ideation::workflow {

struct AuditViolation {
    std::uint64_t event_id = 0;
    std::string reason;
};

struct AuditReport {
    std::size_t events = 0;
    std::size_t llm_calls = 0;
    std::size_t llm_responses = 0;
    std::size_t call_errors = 0;  // error events answering a call
    std::vector<AuditViolation> violations;

    /// Every call answered exactly once.
    bool complete() const noexcept { return llm_calls == llm_responses + call_errors; }
    bool ok() const noexcept { return complete() && violations.empty(); }
};

/// Checks a session log: every agent-produced artifact an llm-call consumes
/// must have been accepted at a gate beforehand, no call is issued while a
/// gate is open, and each call_id is answered by exactly one response or
/// error.
AuditReport audit_log(std::span<const session::LogEvent> events);

}  // namespace ideation::workflow
