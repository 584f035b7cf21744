#include "ideation/workflow/state.hpp"

#include <set>
#include <utility>

#include "ideation/error.hpp"
#include "ideation/workflow/gates.hpp"

namespace ideation::workflow {

#define IDEATION_SETTABLE_FIELDS(X)                                                              \
    X(session_id) X(creator) X(config) X(proposal) X(history) X(candidate) X(pass) X(loop_count) \
    X(papers) X(seen_papers) X(indexed_papers) X(relevance_cache) X(motivation) X(questions)     \
    X(verdicts) X(gap_papers) X(gaps) X(ms_started) X(problem_statement)                         \
    X(problem_statement_agent) X(problems) X(problem_questions) X(method_papers)                 \
    X(method_verdicts) X(evidence) X(methods) X(flags) X(notices) X(outcome) X(next_question)    \
    X(next_gap) X(next_problem) X(next_evidence) X(next_method)

#define IDEATION_INTERNAL_FIELDS(X)                                                           \
    X(tag) X(pending) X(gates_opened) X(last_decision) X(last_iterate) X(llm_calls)           \
    X(llm_responses) X(llm_errors) X(errors) X(last_event_id)

void to_json(nlohmann::json& j, const SessionState& s) {
    j = nlohmann::json::object();
#define X(f) j[#f] = s.f;
    IDEATION_SETTABLE_FIELDS(X)
    IDEATION_INTERNAL_FIELDS(X)
#undef X
}

void from_json(const nlohmann::json& j, SessionState& s) {
#define X(f) j.at(#f).get_to(s.f);
    IDEATION_SETTABLE_FIELDS(X)
    IDEATION_INTERNAL_FIELDS(X)
#undef X
}

std::string canonical(const SessionState& s) { return nlohmann::json(s).dump(); }

void apply_set(SessionState& s, const nlohmann::json& set) {
    if (set.is_null()) return;
    if (!set.is_object()) fail(ErrorCode::CorruptLog, "'set' must be an object");
    for (const auto& [key, value] : set.items()) {
        try {
#define X(f)                  \
    if (key == #f) {          \
        value.get_to(s.f);    \
        continue;             \
    }
            IDEATION_SETTABLE_FIELDS(X)
#undef X
        } catch (const nlohmann::json::exception& ex) {
            fail(ErrorCode::CorruptLog, "bad value for '" + key + "': " + ex.what());
        }
        fail(ErrorCode::CorruptLog, "field '" + key + "' cannot be set by an event");
    }
}

#undef IDEATION_SETTABLE_FIELDS
#undef IDEATION_INTERNAL_FIELDS

bool legal_transition(std::optional<StateTag> from, StateTag to) noexcept {
    using T = StateTag;
    if (!from) return to == T::MvStart;
    static const std::set<std::pair<T, T>> edges = {
        {T::MvStart, T::MvRetrieved},
        {T::MvRetrieved, T::GateAPapers},
        {T::GateAPapers, T::MvChunked},
        {T::MvChunked, T::MvMotivationExtracted},
        {T::MvMotivationExtracted, T::GateBQuestions},
        {T::GateBQuestions, T::MvValidated},
        {T::GateBQuestions, T::GateCVerdicts},
        {T::GateCVerdicts, T::MvValidated},
        {T::GateCVerdicts, T::MvGapsExtracted},
        {T::MvGapsExtracted, T::GateDGaps},
        {T::GateDGaps, T::MvRewritten},
        {T::MvRewritten, T::GateEProposal},
        {T::GateEProposal, T::GateDGaps},
        {T::GateEProposal, T::MvRetrieved},
        {T::GateEProposal, T::Done},
        {T::MvValidated, T::MsProblemExtracted},
        {T::Done, T::MsProblemExtracted},
        {T::MsProblemExtracted, T::MsRelatedGenerated},
        {T::MsRelatedGenerated, T::GateFProblems},
        {T::GateFProblems, T::MsEvidenceGathered},
        {T::MsEvidenceGathered, T::GateGEvidence},
        {T::GateGEvidence, T::MsSynthesized},
        {T::MsSynthesized, T::GateHMethods},
        {T::GateHMethods, T::MsRewritten},
        {T::MsRewritten, T::GateIFinal},
        {T::GateIFinal, T::Done},
        {T::GateIFinal, T::GateHMethods},
    };
    return edges.contains({*from, to});
}

namespace {

StateTag payload_tag(const nlohmann::json& p, const char* key) {
    if (!p.contains(key) || !p.at(key).is_string())
        fail(ErrorCode::CorruptLog, std::string("payload lacks '") + key + "'");
    try {
        return state_tag_from_string(p.at(key).get<std::string>());
    } catch (const Error& e) {
        fail(ErrorCode::CorruptLog, e.what());
    }
}

void check_leave(const SessionState& s, const nlohmann::json& p, StateTag to) {
    StateTag from = payload_tag(p, "from");
    if (from != s.tag)
        fail(ErrorCode::CorruptLog, "transition from " + std::string(to_string(from)) +
                                        " but session is in " + std::string(to_string(s.tag)));
    if (s.pending)
        fail(ErrorCode::CorruptLog, "gate " + s.pending->gate_id + " is still open");
    if (!legal_transition(from, to))
        fail(ErrorCode::CorruptLog, "illegal transition " + std::string(to_string(from)) + " -> " +
                                        std::string(to_string(to)));
    if (from == StateTag::Done && to == StateTag::MsProblemExtracted && s.ms_started)
        fail(ErrorCode::CorruptLog, "method synthesis already ran in this session");
}

}  // namespace

void apply_event(SessionState& s, const session::LogEvent& e) {
    if (e.event_id <= s.last_event_id)
        fail(ErrorCode::CorruptLog, "event_id " + std::to_string(e.event_id) + " is not increasing");
    const auto& p = e.payload;
    switch (e.kind) {
        case session::EventKind::StateTransition: {
            StateTag to = payload_tag(p, "to");
            if (s.last_event_id == 0) {
                if (!p.contains("from") || !p.at("from").is_null() || !legal_transition(std::nullopt, to))
                    fail(ErrorCode::CorruptLog, "log must start with session creation");
            } else {
                check_leave(s, p, to);
            }
            if (p.contains("set")) apply_set(s, p.at("set"));
            s.tag = to;
            break;
        }
        case session::EventKind::GateOpen: {
            if (s.last_event_id == 0) fail(ErrorCode::CorruptLog, "log must start with session creation");
            StateTag kind = payload_tag(p, "kind");
            if (!is_gate(kind)) fail(ErrorCode::CorruptLog, "gate-open for a non-gate state");
            check_leave(s, p, kind);
            if (!p.contains("gate_id") || !p.at("gate_id").is_string())
                fail(ErrorCode::CorruptLog, "gate-open lacks gate_id");
            if (p.contains("set")) apply_set(s, p.at("set"));
            s.tag = kind;
            s.pending = PendingGate{p.at("gate_id").get<std::string>(), kind};
            ++s.gates_opened;
            break;
        }
        case session::EventKind::GateEdit:
            apply_gate_edit(s, p);
            break;
        case session::EventKind::LlmCall:
            ++s.llm_calls;
            break;
        case session::EventKind::LlmResponse:
            ++s.llm_responses;
            break;
        case session::EventKind::Error:
            ++s.errors;
            if (p.contains("call_id")) ++s.llm_errors;
            break;
    }
    s.last_event_id = e.event_id;
}

}  // namespace ideation::workflow
