#include <gtest/gtest.h>

#include "ideation/error.hpp"
#include "ideation/workflow/state.hpp"

using namespace ideation;
using namespace ideation::workflow;
using session::Actor;
using session::EventKind;
using session::LogEvent;
using nlohmann::json;

namespace {

LogEvent ev(std::uint64_t id, EventKind kind, json payload) {
    return {id, "2024-01-01T00:00:00.000Z", Actor::System, kind, std::move(payload)};
}

LogEvent create(std::uint64_t id = 1) {
    return ev(id, EventKind::StateTransition,
              {{"from", nullptr}, {"to", "MV-Start"}, {"set", {{"session_id", "s"}, {"creator", "r"}}}});
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Io;
}

}  // namespace

TEST(StateMachine, LegalTransitions) {
    EXPECT_TRUE(legal_transition(std::nullopt, StateTag::MvStart));
    EXPECT_FALSE(legal_transition(std::nullopt, StateTag::MvRetrieved));
    EXPECT_TRUE(legal_transition(StateTag::GateBQuestions, StateTag::MvValidated));
    EXPECT_TRUE(legal_transition(StateTag::GateEProposal, StateTag::MvRetrieved));
    EXPECT_TRUE(legal_transition(StateTag::GateIFinal, StateTag::GateHMethods));
    EXPECT_FALSE(legal_transition(StateTag::MvStart, StateTag::Done));
    EXPECT_FALSE(legal_transition(StateTag::Done, StateTag::MvStart));
    EXPECT_TRUE(is_gate(StateTag::GateGEvidence));
    EXPECT_FALSE(is_gate(StateTag::MsSynthesized));
    for (int i = 0; i <= static_cast<int>(StateTag::Done); ++i) {
        auto t = static_cast<StateTag>(i);
        EXPECT_EQ(state_tag_from_string(to_string(t)), t);
    }
}

TEST(StateMachine, FoldOfCreationAndTransition) {
    SessionState s;
    apply_event(s, create());
    EXPECT_EQ(s.session_id, "s");
    EXPECT_EQ(s.tag, StateTag::MvStart);
    apply_event(s, ev(2, EventKind::StateTransition, {{"from", "MV-Start"}, {"to", "MV-Retrieved"}, {"set", {{"pass", 1}}}}));
    EXPECT_EQ(s.tag, StateTag::MvRetrieved);
    EXPECT_EQ(s.pass, 1);
    apply_event(s, ev(3, EventKind::GateOpen, {{"from", "MV-Retrieved"}, {"kind", "GateA-Papers"}, {"gate_id", "G1"}}));
    ASSERT_TRUE(s.pending);
    EXPECT_EQ(s.pending->gate_id, "G1");
    EXPECT_EQ(s.gates_opened, 1u);
    apply_event(s, ev(4, EventKind::LlmCall, {}));
    apply_event(s, ev(5, EventKind::Error, {{"call_id", "c"}}));
    EXPECT_EQ(s.llm_calls, 1u);
    EXPECT_EQ(s.llm_errors, 1u);
}

TEST(StateMachine, RejectsBadEvents) {
    SessionState s;
    EXPECT_EQ(code_of([&] { apply_event(s, ev(1, EventKind::GateOpen, {{"kind", "GateA-Papers"}})); }),
              ErrorCode::CorruptLog);
    apply_event(s, create());
    auto cases = std::vector<LogEvent>{
        create(1),                                                                          // id repeats
        ev(2, EventKind::StateTransition, {{"from", "MV-Start"}, {"to", "Done"}}),          // illegal edge
        ev(2, EventKind::StateTransition, {{"from", "MV-Chunked"}, {"to", "MV-MotivationExtracted"}}),  // wrong from
        ev(2, EventKind::StateTransition, {{"from", "MV-Start"}}),                          // no target
        ev(2, EventKind::StateTransition, {{"from", "MV-Start"}, {"to", "Nowhere"}}),
        ev(2, EventKind::StateTransition, {{"from", "MV-Start"}, {"to", "MV-Retrieved"}, {"set", {{"tag", "Done"}}}}),
        ev(2, EventKind::StateTransition, {{"from", "MV-Start"}, {"to", "MV-Retrieved"}, {"set", {{"pass", "x"}}}}),
        ev(2, EventKind::GateOpen, {{"from", "MV-Start"}, {"kind", "MV-Retrieved"}, {"gate_id", "x"}}),
    };
    const auto before = canonical(s);
    for (const auto& e : cases) {
        SessionState copy = s;
        EXPECT_EQ(code_of([&] { apply_event(copy, e); }), ErrorCode::CorruptLog) << canonical_line(e);
    }
    EXPECT_EQ(canonical(s), before);
}

TEST(StateMachine, NoTransitionWhileGateOpen) {
    SessionState s;
    apply_event(s, create());
    apply_event(s, ev(2, EventKind::StateTransition, {{"from", "MV-Start"}, {"to", "MV-Retrieved"}}));
    apply_event(s, ev(3, EventKind::GateOpen, {{"from", "MV-Retrieved"}, {"kind", "GateA-Papers"}, {"gate_id", "G1"}}));
    EXPECT_EQ(code_of([&] {
                  apply_event(s, ev(4, EventKind::StateTransition, {{"from", "GateA-Papers"}, {"to", "MV-Chunked"}}));
              }),
              ErrorCode::CorruptLog);
}

TEST(StateMachine, CanonicalRoundTrip) {
    SessionState s;
    apply_event(s, create());
    s.papers.push_back({"p1", "Title", 0.5, 1});
    s.verdicts.push_back({"q1", "p1", {agents::Verdict::Yes, "because"}, {"p1:0000.000"}});
    s.proposal = Proposal{"T", "A", 0, Provenance::Original};
    s.pending = PendingGate{"G9", StateTag::GateCVerdicts};
    auto text = canonical(s);
    auto back = json::parse(text).get<SessionState>();
    EXPECT_EQ(canonical(back), text);
}
