#include "ideation/session/export.hpp"

#include <map>

#include "ideation/error.hpp"
#include "ideation/workflow/state.hpp"

namespace ideation::session {

using nlohmann::json;
using workflow::SessionState;
using workflow::StateTag;

std::string_view to_string(ExportTask t) noexcept {
    switch (t) {
        case ExportTask::MotivationRetrieval: return "motivation-retrieval";
        case ExportTask::ProposalRewrite: return "proposal-rewrite";
        case ExportTask::ProblemRetrieval: return "problem-retrieval";
        case ExportTask::MethodSynthesis: return "method-synthesis";
    }
    return "motivation-retrieval";
}

ExportTask export_task_from_string(std::string_view s) {
    for (auto t : {ExportTask::MotivationRetrieval, ExportTask::ProposalRewrite, ExportTask::ProblemRetrieval,
                   ExportTask::MethodSynthesis})
        if (to_string(t) == s) return t;
    fail(ErrorCode::InvalidArgument, "unknown export task '" + std::string(s) +
                                         "' (motivation-retrieval, proposal-rewrite, problem-retrieval, "
                                         "method-synthesis)");
}

namespace {

std::string title_of(const SessionState& s, const std::string& pid) {
    for (const auto& p : s.papers)
        if (p.paper_id == pid) return p.title;
    for (const auto& p : s.method_papers)
        if (p.paper_id == pid) return p.title;
    return {};
}

json answer_json(const std::string& pid, const std::string& title, const agents::BinaryAnswer& a) {
    return {{"paper_id", pid},
            {"title", title},
            {"verdict", agents::to_string(a.verdict)},
            {"justification", a.justification.value_or("")}};
}

json record(ExportTask task, const SessionState& s, json input, json output, json validated) {
    return {{"task", to_string(task)},
            {"session_id", s.session_id},
            {"input", std::move(input)},
            {"agent_output", std::move(output)},
            {"validated", std::move(validated)}};
}

void motivation_pairs(const SessionState& s, std::vector<json>& out) {
    std::map<std::string, std::string> questions;
    for (const auto& q : s.questions) questions[q.question_id] = q.text;
    for (const auto& v : s.verdicts) {
        bool yes = v.answer.verdict == agents::Verdict::Yes && workflow::active(v.status);
        out.push_back(record(ExportTask::MotivationRetrieval, s,
                             {{"proposal", *s.proposal}, {"question", questions[v.question_id]}, {"pass", s.pass}},
                             answer_json(v.paper_id, title_of(s, v.paper_id), v.answer),
                             {{"label", yes ? "yes" : "no"}}));
    }
}

}  // namespace

ExportResult export_dataset(std::span<const LogEvent> events, ExportTask task) {
    ExportResult result;
    SessionState s;
    for (const auto& e : events) {
        const SessionState before = s;
        try {
            workflow::apply_event(s, e);
        } catch (const Error& err) {
            result.records.clear();
            result.notice = "log rejected at event " + std::to_string(e.event_id) + ": " + err.what();
            return result;
        }
        const bool resolved = e.kind == EventKind::GateEdit && before.pending && s.last_decision == "accept";
        const StateTag kind = before.pending ? before.pending->kind : StateTag::MvStart;
        switch (task) {
            case ExportTask::MotivationRetrieval:
                if ((s.tag == StateTag::MvValidated || s.tag == StateTag::MvGapsExtracted) &&
                    (before.tag == StateTag::GateBQuestions || before.tag == StateTag::GateCVerdicts))
                    motivation_pairs(s, result.records);
                break;
            case ExportTask::ProposalRewrite:
                if (resolved && kind == StateTag::GateEProposal) {
                    json gaps = json::array();
                    for (const auto& g : before.gaps)
                        if (workflow::active(g.status) && g.selected) gaps.push_back(g.text);
                    result.records.push_back(record(task, s, {{"proposal", *before.proposal}, {"gaps", gaps}},
                                                    {{"proposal", *before.candidate}},
                                                    {{"proposal", *s.proposal}}));
                }
                break;
            case ExportTask::ProblemRetrieval:
                if (resolved && kind == StateTag::GateGEvidence) {
                    std::map<std::string, std::string> problems;
                    for (const auto& p : s.problems) problems[p.problem_id] = p.text;
                    for (const auto& v : s.method_verdicts) {
                        bool yes = false;
                        for (const auto& ev : s.evidence)
                            if (ev.accepted && ev.problem_id == v.problem_id && ev.paper_id == v.paper_id) yes = true;
                        result.records.push_back(
                            record(task, s, {{"problem", problems[v.problem_id]}, {"question", v.question}},
                                   answer_json(v.paper_id, title_of(s, v.paper_id), v.answer),
                                   {{"label", yes ? "yes" : "no"}}));
                    }
                }
                break;
            case ExportTask::MethodSynthesis:
                if (resolved && kind == StateTag::GateHMethods) {
                    json evidence = json::array();
                    for (const auto& ev : s.evidence)
                        if (ev.accepted)
                            evidence.push_back(
                                {{"paper_id", ev.paper_id}, {"title", ev.title}, {"methodology", ev.methodology_text}});
                    json generated = json::array(), accepted = json::array();
                    for (const auto& m : s.methods) {
                        if (m.status != workflow::ItemStatus::Added) generated.push_back(m.agent_text);
                        if (m.accepted) accepted.push_back(m.text);
                    }
                    result.records.push_back(record(
                        task, s,
                        {{"proposal", *s.proposal}, {"problem", s.problem_statement}, {"evidence", evidence}},
                        {{"methods", generated}}, {{"methods", accepted}}));
                }
                break;
        }
    }
    if (!workflow::is_terminal(s.tag) || s.pending) {
        result.records.clear();
        result.notice = "session " + (s.session_id.empty() ? std::string("?") : s.session_id) +
                        " has not finished (state " + std::string(workflow::to_string(s.tag)) +
                        "); nothing to export";
    }
    return result;
}

void write_jsonl(std::ostream& out, const std::vector<json>& records) {
    for (const auto& r : records) out << r.dump() << '\n';
}

}  // namespace ideation::session
