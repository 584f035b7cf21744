#include "ideation/workflow/audit.hpp"

#include <map>
#include <set>

#include "ideation/error.hpp"
#include "ideation/workflow/state.hpp"

namespace ideation::workflow {

namespace {

void clear_gate(const SessionState& s, StateTag kind, std::set<std::string>& cleared) {
    switch (kind) {
        case StateTag::GateAPapers:
            for (const auto& p : s.papers)
                if (active(p.status)) cleared.insert("paper:" + p.paper_id);
            break;
        case StateTag::GateBQuestions:
            for (const auto& q : s.questions)
                if (active(q.status)) cleared.insert("question:" + q.question_id);
            break;
        case StateTag::GateCVerdicts:
            for (const auto& v : s.verdicts)
                if (active(v.status) && v.answer.verdict == agents::Verdict::Yes)
                    cleared.insert("verdict:" + v.item_id());
            break;
        case StateTag::GateDGaps:
            for (const auto& g : s.gaps)
                if (active(g.status)) cleared.insert("gap:" + g.gap_id);
            break;
        case StateTag::GateFProblems:
            cleared.insert("problem-statement");
            for (const auto& p : s.problems)
                if (active(p.status)) cleared.insert("problem:" + p.problem_id);
            break;
        case StateTag::GateGEvidence:
            for (const auto& e : s.evidence)
                if (e.accepted) cleared.insert("evidence:" + e.evidence_id);
            break;
        case StateTag::GateHMethods:
            for (const auto& m : s.methods)
                if (m.accepted) cleared.insert("method:" + m.method_id);
            break;
        default:
            break;
    }
}

bool proposal_adopted(const SessionState& s, const std::string& ref) {
    for (const auto& p : s.history)
        if (ref == "proposal:v" + std::to_string(p.version)) return true;
    return false;
}

}  // namespace

AuditReport audit_log(std::span<const session::LogEvent> events) {
    AuditReport report;
    SessionState state;
    std::set<std::string> cleared;
    std::map<std::string, int> answers;  // call_id -> responses seen

    for (const auto& e : events) {
        ++report.events;
        const auto& p = e.payload;
        if (e.kind == session::EventKind::LlmCall) {
            ++report.llm_calls;
            auto call_id = p.value("call_id", "");
            if (call_id.empty() || answers.count(call_id))
                report.violations.push_back({e.event_id, "missing or repeated call_id '" + call_id + "'"});
            answers[call_id] = 0;
            if (state.pending)
                report.violations.push_back({e.event_id, "agent call while gate " + state.pending->gate_id +
                                                             " is open"});
            if (p.contains("consumes") && p.at("consumes").is_array()) {
                for (const auto& r : p.at("consumes")) {
                    auto ref = r.get<std::string>();
                    bool ok = ref.starts_with("proposal:") ? proposal_adopted(state, ref) : cleared.contains(ref);
                    if (!ok)
                        report.violations.push_back(
                            {e.event_id, call_id + " consumes '" + ref + "' before it was accepted at a gate"});
                }
            }
        } else if (e.kind == session::EventKind::LlmResponse ||
                   (e.kind == session::EventKind::Error && p.contains("call_id"))) {
            auto call_id = p.value("call_id", "");
            auto it = answers.find(call_id);
            if (it == answers.end())
                report.violations.push_back({e.event_id, "answer to unknown call '" + call_id + "'"});
            else if (++it->second > 1)
                report.violations.push_back({e.event_id, "call '" + call_id + "' answered twice"});
            if (e.kind == session::EventKind::LlmResponse)
                ++report.llm_responses;
            else
                ++report.call_errors;
        }

        std::optional<StateTag> resolving;
        if (e.kind == session::EventKind::GateEdit && state.pending) resolving = state.pending->kind;
        try {
            apply_event(state, e);
        } catch (const Error& err) {
            report.violations.push_back({e.event_id, std::string("log does not replay: ") + err.what()});
            break;
        }
        if (resolving && state.last_decision == "accept") clear_gate(state, *resolving, cleared);
    }
    for (const auto& [id, n] : answers)
        if (n == 0) report.violations.push_back({0, "call '" + id + "' was never answered"});
    return report;
}

}  // namespace ideation::workflow
