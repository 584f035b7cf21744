#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ideation/session/event.hpp"
#include "ideation/workflow/types.hpp"

namespace ideation::workflow {

struct PendingGate {
    std::string gate_id;
    StateTag kind = StateTag::GateAPapers;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PendingGate, gate_id, kind)

/// Everything the workflow knows about one session. It is a pure fold of the
/// session log: `apply_event` is the only way it changes, for live runs and
/// for replay alike.
struct SessionState {
    std::string session_id;
    std::string creator;
    nlohmann::json config = nlohmann::json::object();

    StateTag tag = StateTag::MvStart;
    std::optional<PendingGate> pending;
    std::uint64_t gates_opened = 0;
    std::string last_decision;  // decision of the most recently resolved gate
    bool last_iterate = false;

    std::optional<Proposal> proposal;   // current adopted version
    std::vector<Proposal> history;      // every adopted version, oldest first
    std::optional<Proposal> candidate;  // rewrite awaiting Gate E / Gate I

    int pass = 0;        // motivation-validation passes started
    int loop_count = 0;  // revalidations requested at Gate E

    std::vector<CandidatePaper> papers;
    std::vector<std::string> seen_papers;     // sorted
    std::vector<std::string> indexed_papers;  // sorted; rebuilt into the user corpus on resume
    std::map<std::string, std::string> relevance_cache;  // "paper@version" -> description

    std::vector<std::string> motivation;
    std::vector<ValidationQuestion> questions;
    std::vector<ValidationVerdict> verdicts;
    std::vector<std::string> gap_papers;
    std::vector<ResearchGap> gaps;

    bool ms_started = false;
    std::string problem_statement;
    std::string problem_statement_agent;
    std::vector<RelatedProblem> problems;
    std::map<std::string, std::string> problem_questions;
    std::vector<MethodPaper> method_papers;
    std::vector<MethodVerdict> method_verdicts;
    std::vector<MethodEvidence> evidence;
    std::vector<SynthesizedMethod> methods;

    std::vector<std::string> flags;
    std::vector<std::string> notices;
    std::string outcome;

    std::uint64_t next_question = 1;
    std::uint64_t next_gap = 1;
    std::uint64_t next_problem = 1;
    std::uint64_t next_evidence = 1;
    std::uint64_t next_method = 1;

    std::uint64_t llm_calls = 0;
    std::uint64_t llm_responses = 0;
    std::uint64_t llm_errors = 0;  // error events tied to a call_id
    std::uint64_t errors = 0;
    std::uint64_t last_event_id = 0;
};

void to_json(nlohmann::json& j, const SessionState& s);
void from_json(const nlohmann::json& j, SessionState& s);

/// Canonical text form; two states are equal iff their canonical forms are.
std::string canonical(const SessionState& s);

bool legal_transition(std::optional<StateTag> from, StateTag to) noexcept;

/// Folds one event into the state. Throws ideation::Error when the event
/// cannot follow the current state (CorruptLog for structural problems,
/// StaleGate / InvalidArgument / PreconditionFailed for bad gate edits).
void apply_event(SessionState& s, const session::LogEvent& e);

/// Applies a `set` object of a state-transition or gate-open payload.
void apply_set(SessionState& s, const nlohmann::json& set);

}  // namespace ideation::workflow
