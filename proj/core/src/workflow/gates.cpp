#include "ideation/workflow/gates.hpp"

#include <algorithm>

#include "ideation/error.hpp"
#include "ideation/text.hpp"
#include "ideation/workflow/diff.hpp"

namespace ideation::workflow {

using nlohmann::json;

GateSubmission submission_from_json(const json& j) {
    if (!j.is_object()) fail(ErrorCode::InvalidArgument, "gate submission must be an object");
    GateSubmission sub;
    try {
        sub.gate_id = j.at("gate_id").get<std::string>();
        if (j.contains("edits")) sub.edits = j.at("edits");
        if (j.contains("decision")) sub.decision = j.at("decision").get<std::string>();
        if (j.contains("iterate")) sub.iterate = j.at("iterate").get<bool>();
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidArgument, std::string("bad gate submission: ") + e.what());
    }
    return sub;
}

json edit_payload(const GateSubmission& sub, StateTag kind) {
    return {{"gate_id", sub.gate_id},
            {"kind", to_string(kind)},
            {"edits", sub.edits},
            {"decision", sub.decision},
            {"iterate", sub.iterate}};
}

std::string next_gate_id(const SessionState& s, StateTag kind) {
    return "G" + std::to_string(s.gates_opened + 1) + "-" + std::string(to_string(kind));
}

namespace {

[[noreturn]] void bad_edit(const std::string& msg) { fail(ErrorCode::InvalidArgument, msg); }

std::string str_field(const json& edit, const char* key, bool required = true) {
    if (!edit.contains(key)) {
        if (required) bad_edit(std::string("edit lacks '") + key + "'");
        return {};
    }
    if (!edit.at(key).is_string()) bad_edit(std::string("'") + key + "' must be a string");
    return edit.at(key).get<std::string>();
}

void mark_edited(ItemStatus& st) {
    if (st != ItemStatus::Added) st = ItemStatus::Edited;
}

template <typename Vec, typename Key>
auto& find_active(Vec& items, const std::string& id, Key key, const char* what) {
    auto it = std::find_if(items.begin(), items.end(),
                           [&](const auto& item) { return key(item) == id && active(item.status); });
    if (it == items.end()) bad_edit(std::string("no ") + what + " '" + id + "' at this gate");
    return *it;
}

std::string_view op_of(const json& edit) {
    if (!edit.is_object() || !edit.contains("op") || !edit.at("op").is_string())
        bad_edit("each edit needs a string 'op'");
    return edit.at("op").get_ref<const std::string&>();
}

[[noreturn]] void bad_op(std::string_view op, StateTag kind) {
    bad_edit("operation '" + std::string(op) + "' is not allowed at " + std::string(to_string(kind)));
}

std::string display_name(const std::string& id, const std::string& title) {
    return title.empty() ? id : title;
}

void edit_papers(SessionState& s, const json& edit) {
    auto op = op_of(edit);
    if (op == "delete") {
        auto id = str_field(edit, "id");
        find_active(s.papers, id, [](const CandidatePaper& p) { return p.paper_id; }, "paper").status =
            ItemStatus::Deleted;
    } else if (op == "add") {
        auto id = str_field(edit, "paper_id");
        auto title = str_field(edit, "title");
        auto it = std::find_if(s.papers.begin(), s.papers.end(),
                               [&](const CandidatePaper& p) { return p.paper_id == id; });
        if (it != s.papers.end()) {
            if (active(it->status)) bad_edit("paper '" + id + "' is already in the list");
            it->status = ItemStatus::Added;
            return;
        }
        CandidatePaper p;
        p.paper_id = id;
        p.title = title;
        p.origin = "researcher";
        p.status = ItemStatus::Added;
        p.previously_seen = std::binary_search(s.seen_papers.begin(), s.seen_papers.end(), id);
        s.papers.push_back(std::move(p));
    } else {
        bad_op(op, StateTag::GateAPapers);
    }
}

void edit_questions(SessionState& s, const json& edit) {
    auto op = op_of(edit);
    auto key = [](const ValidationQuestion& q) { return q.question_id; };
    if (op == "delete") {
        find_active(s.questions, str_field(edit, "id"), key, "question").status = ItemStatus::Deleted;
    } else if (op == "update") {
        auto& q = find_active(s.questions, str_field(edit, "id"), key, "question");
        auto t = std::string(text::trim(str_field(edit, "text")));
        if (!t.starts_with(kQuestionPrefix))
            bad_edit("validation questions must start with \"" + std::string(kQuestionPrefix) + "\"");
        q.text = std::move(t);
        mark_edited(q.status);
    } else if (op == "add") {
        auto t = std::string(text::trim(str_field(edit, "text")));
        if (t.empty()) bad_edit("question text is empty");
        ValidationQuestion q;
        q.question_id = "q" + std::to_string(s.next_question++);
        q.text = std::move(t);
        q.source_motivation_bullet = str_field(edit, "source", false);
        q.status = ItemStatus::Added;
        s.questions.push_back(std::move(q));
    } else {
        bad_op(op, StateTag::GateBQuestions);
    }
}

void edit_verdicts(SessionState& s, const json& edit) {
    auto op = op_of(edit);
    if (op != "delete") bad_op(op, StateTag::GateCVerdicts);
    auto id = str_field(edit, "id");
    auto it = std::find_if(s.verdicts.begin(), s.verdicts.end(), [&](const ValidationVerdict& v) {
        return v.item_id() == id && v.answer.verdict == agents::Verdict::Yes && active(v.status);
    });
    if (it == s.verdicts.end()) bad_edit("no Yes verdict '" + id + "' at this gate");
    it->status = ItemStatus::Deleted;
}

void edit_gaps(SessionState& s, const json& edit) {
    auto op = op_of(edit);
    auto key = [](const ResearchGap& g) { return g.gap_id; };
    auto selected = [&](bool fallback) {
        if (!edit.contains("selected")) return fallback;
        if (!edit.at("selected").is_boolean()) bad_edit("'selected' must be a boolean");
        return edit.at("selected").get<bool>();
    };
    if (op == "delete") {
        auto& g = find_active(s.gaps, str_field(edit, "id"), key, "gap");
        g.status = ItemStatus::Deleted;
        g.selected = false;
    } else if (op == "update") {
        auto& g = find_active(s.gaps, str_field(edit, "id"), key, "gap");
        if (edit.contains("text")) {
            auto t = std::string(text::trim(str_field(edit, "text")));
            if (t.empty()) bad_edit("gap text is empty");
            if (t != g.text) {
                g.text = std::move(t);
                mark_edited(g.status);
            }
        }
        g.selected = selected(g.selected);
    } else if (op == "add") {
        auto t = std::string(text::trim(str_field(edit, "text")));
        if (t.empty()) bad_edit("gap text is empty");
        ResearchGap g;
        g.gap_id = "g" + std::to_string(s.next_gap++);
        g.paper_id = str_field(edit, "paper_id", false);
        g.text = std::move(t);
        g.origin = "researcher";
        g.selected = selected(true);
        g.status = ItemStatus::Added;
        s.gaps.push_back(std::move(g));
    } else {
        bad_op(op, StateTag::GateDGaps);
    }
}

std::optional<Proposal> edit_proposal(const SessionState& s, const json& edits, StateTag kind) {
    std::optional<Proposal> edited;
    for (const auto& edit : edits) {
        auto op = op_of(edit);
        if (op != "update") bad_op(op, kind);
        if (str_field(edit, "id") != "proposal") bad_edit("the only item at this gate is 'proposal'");
        if (edited) bad_edit("at most one proposal edit per submission");
        Proposal p = *s.candidate;
        if (edit.contains("title")) p.title = std::string(text::trim(str_field(edit, "title")));
        if (edit.contains("abstract")) p.abstract = std::string(text::trim(str_field(edit, "abstract")));
        if (p.title.empty() || p.abstract.empty()) bad_edit("proposal title and abstract must be non-empty");
        p.version = s.candidate->version + 1;
        p.provenance = Provenance::ResearcherEdited;
        edited = std::move(p);
    }
    return edited;
}

void edit_problems(SessionState& s, const json& edit) {
    auto op = op_of(edit);
    auto key = [](const RelatedProblem& p) { return p.problem_id; };
    if (op == "delete") {
        find_active(s.problems, str_field(edit, "id"), key, "problem").status = ItemStatus::Deleted;
    } else if (op == "update") {
        auto id = str_field(edit, "id");
        auto t = std::string(text::trim(str_field(edit, "text")));
        if (t.empty()) bad_edit("problem text is empty");
        if (id == "problem-statement") {
            s.problem_statement = std::move(t);
            return;
        }
        auto& p = find_active(s.problems, id, key, "problem");
        p.text = std::move(t);
        mark_edited(p.status);
    } else if (op == "add") {
        auto t = std::string(text::trim(str_field(edit, "text")));
        if (t.empty()) bad_edit("problem text is empty");
        RelatedProblem p;
        p.problem_id = "pr" + std::to_string(s.next_problem++);
        auto kind = str_field(edit, "kind", false);
        if (kind.empty() || kind == "similar")
            p.kind = ProblemKind::Similar;
        else if (kind == "subtask")
            p.kind = ProblemKind::Subtask;
        else
            bad_edit("problem kind must be 'similar' or 'subtask'");
        p.text = std::move(t);
        p.status = ItemStatus::Added;
        s.problems.push_back(std::move(p));
    } else {
        bad_op(op, StateTag::GateFProblems);
    }
}

void edit_evidence(SessionState& s, const json& edit) {
    auto op = op_of(edit);
    auto key = [](const MethodEvidence& e) { return e.evidence_id; };
    if (op == "delete") {
        find_active(s.evidence, str_field(edit, "id"), key, "evidence").status = ItemStatus::Deleted;
    } else if (op == "update") {
        auto& e = find_active(s.evidence, str_field(edit, "id"), key, "evidence");
        auto t = std::string(text::trim(str_field(edit, "methodology")));
        if (t.empty()) bad_edit("methodology text is empty");
        e.methodology_text = std::move(t);
        mark_edited(e.status);
    } else {
        bad_op(op, StateTag::GateGEvidence);
    }
}

void edit_methods(SessionState& s, const json& edit) {
    auto op = op_of(edit);
    auto key = [](const SynthesizedMethod& m) { return m.method_id; };
    if (op == "delete") {
        find_active(s.methods, str_field(edit, "id"), key, "method").status = ItemStatus::Deleted;
    } else if (op == "update") {
        auto& m = find_active(s.methods, str_field(edit, "id"), key, "method");
        auto t = std::string(text::trim(str_field(edit, "text")));
        if (t.empty()) bad_edit("method text is empty");
        m.text = std::move(t);
        mark_edited(m.status);
    } else if (op == "add") {
        auto t = std::string(text::trim(str_field(edit, "text")));
        if (t.empty()) bad_edit("method text is empty");
        SynthesizedMethod m;
        m.method_id = "m" + std::to_string(s.next_method++);
        m.text = std::move(t);
        m.status = ItemStatus::Added;
        s.methods.push_back(std::move(m));
    } else {
        bad_op(op, StateTag::GateHMethods);
    }
}

template <typename Vec>
bool any_active(const Vec& v) {
    return std::any_of(v.begin(), v.end(), [](const auto& x) { return active(x.status); });
}

[[noreturn]] void unmet(const std::string& msg) { fail(ErrorCode::PreconditionFailed, msg); }

}  // namespace

void apply_gate_edit(SessionState& s, const json& payload) {
    if (!payload.is_object()) bad_edit("gate edit must be an object");
    auto gate_id = str_field(payload, "gate_id");
    if (!s.pending || s.pending->gate_id != gate_id)
        fail(ErrorCode::StaleGate, "gate '" + gate_id + "' is not the pending gate" +
                                       (s.pending ? " (pending: " + s.pending->gate_id + ")" : ""));
    const StateTag kind = s.pending->kind;
    if (payload.contains("kind") && payload.at("kind") != json(to_string(kind)))
        bad_edit("gate kind does not match the pending gate");

    std::string decision = payload.contains("decision") ? str_field(payload, "decision") : "accept";
    bool iterate = payload.value("iterate", false);
    const bool proposal_gate = kind == StateTag::GateEProposal || kind == StateTag::GateIFinal;
    if (decision != "accept" && !(decision == "reject" && proposal_gate))
        bad_edit("decision '" + decision + "' is not allowed at " + std::string(to_string(kind)));
    if (iterate && (kind != StateTag::GateEProposal || decision != "accept"))
        bad_edit("'iterate' only applies when accepting the rewritten proposal");

    json edits = payload.contains("edits") ? payload.at("edits") : json::array();
    if (!edits.is_array()) bad_edit("'edits' must be an array");

    SessionState t = s;
    switch (kind) {
        case StateTag::GateAPapers:
            for (const auto& e : edits) edit_papers(t, e);
            if (!any_active(t.papers)) unmet("accept at least one paper (add papers from the corpus)");
            break;
        case StateTag::GateBQuestions:
            for (const auto& e : edits) edit_questions(t, e);
            if (!any_active(t.questions)) unmet("at least one validation question is required");
            break;
        case StateTag::GateCVerdicts:
            for (const auto& e : edits) edit_verdicts(t, e);
            break;
        case StateTag::GateDGaps:
            for (const auto& e : edits) edit_gaps(t, e);
            if (std::none_of(t.gaps.begin(), t.gaps.end(),
                             [](const ResearchGap& g) { return active(g.status) && g.selected; }))
                unmet("select at least one research gap");
            break;
        case StateTag::GateEProposal:
        case StateTag::GateIFinal: {
            if (!t.candidate) fail(ErrorCode::CorruptLog, "proposal gate without a candidate");
            if (decision == "reject") {
                if (!edits.empty()) bad_edit("a rejected rewrite cannot carry edits");
                t.candidate.reset();
                break;
            }
            auto edited = edit_proposal(t, edits, kind);
            Proposal adopted = edited ? *edited : *t.candidate;
            t.proposal = adopted;
            t.history.push_back(std::move(adopted));
            t.candidate.reset();
            break;
        }
        case StateTag::GateFProblems:
            for (const auto& e : edits) edit_problems(t, e);
            if (text::trim(t.problem_statement).empty()) unmet("the problem statement is empty");
            if (!any_active(t.problems)) unmet("at least one problem is required");
            break;
        case StateTag::GateGEvidence:
            for (const auto& e : edits) edit_evidence(t, e);
            for (auto& e : t.evidence) e.accepted = active(e.status);
            break;
        case StateTag::GateHMethods:
            for (const auto& e : edits) edit_methods(t, e);
            if (!any_active(t.methods)) unmet("at least one method is required");
            for (auto& m : t.methods) m.accepted = active(m.status);
            break;
        default:
            fail(ErrorCode::CorruptLog, "pending gate has a non-gate kind");
    }
    t.pending.reset();
    t.last_decision = decision;
    t.last_iterate = iterate;
    s = std::move(t);
}

namespace {

std::string paper_title(const SessionState& s, const std::string& id) {
    for (const auto& p : s.papers)
        if (p.paper_id == id) return p.title;
    for (const auto& p : s.method_papers)
        if (p.paper_id == id) return p.title;
    return {};
}

std::string question_text(const SessionState& s, const std::string& id) {
    for (const auto& q : s.questions)
        if (q.question_id == id) return q.text;
    return {};
}

json proposal_item(const Proposal& prior, const Proposal& revised) {
    return {{"id", "proposal"},
            {"prior", prior},
            {"revised", revised},
            {"diff", {{"title", diff_to_json(word_diff(prior.title, revised.title))},
                      {"abstract", diff_to_json(word_diff(prior.abstract, revised.abstract))}}}};
}

}  // namespace

json gate_envelope(const SessionState& s) {
    if (!s.pending) fail(ErrorCode::PreconditionFailed, "no gate is open");
    const StateTag kind = s.pending->kind;
    json env = {{"session_id", s.session_id},
                {"gate_id", s.pending->gate_id},
                {"kind", to_string(kind)},
                {"flags", s.flags},
                {"notices", s.notices},
                {"decisions", json::array({"accept"})},
                {"context", json::object()}};
    json items = json::array();
    json ops = json::array();
    switch (kind) {
        case StateTag::GateAPapers:
            ops = {"add", "delete"};
            for (const auto& p : s.papers) {
                json item = p;
                item["id"] = p.paper_id;
                items.push_back(std::move(item));
            }
            env["context"]["pass"] = s.pass;
            break;
        case StateTag::GateBQuestions:
            ops = {"add", "update", "delete"};
            for (const auto& q : s.questions) {
                json item = q;
                item["id"] = q.question_id;
                items.push_back(std::move(item));
            }
            env["context"]["motivation"] = s.motivation;
            env["context"]["required_prefix"] = kQuestionPrefix;
            break;
        case StateTag::GateCVerdicts: {
            ops = {"delete"};
            std::size_t yes = 0, no = 0, unanswerable = 0;
            for (const auto& v : s.verdicts) {
                switch (v.answer.verdict) {
                    case agents::Verdict::Yes: ++yes; break;
                    case agents::Verdict::No: ++no; break;
                    case agents::Verdict::Unanswerable: ++unanswerable; break;
                }
                if (v.answer.verdict != agents::Verdict::Yes) continue;
                items.push_back({{"id", v.item_id()},
                                 {"question_id", v.question_id},
                                 {"question", question_text(s, v.question_id)},
                                 {"paper_id", v.paper_id},
                                 {"title", paper_title(s, v.paper_id)},
                                 {"justification", v.answer.justification.value_or("")},
                                 {"supporting_chunk_ids", v.supporting_chunk_ids},
                                 {"status", v.status}});
            }
            env["context"]["counts"] = {{"yes", yes}, {"no", no}, {"unanswerable", unanswerable}};
            break;
        }
        case StateTag::GateDGaps:
            ops = {"add", "update", "delete"};
            for (const auto& g : s.gaps) {
                json item = g;
                item["id"] = g.gap_id;
                item["title"] = paper_title(s, g.paper_id);
                items.push_back(std::move(item));
            }
            {
                json groups = json::array();
                for (const auto& pid : s.gap_papers)
                    groups.push_back({{"paper_id", pid}, {"title", display_name(pid, paper_title(s, pid))}});
                env["context"]["papers"] = std::move(groups);
            }
            break;
        case StateTag::GateEProposal:
        case StateTag::GateIFinal:
            ops = {"update"};
            env["decisions"] = {"accept", "reject"};
            if (s.candidate && s.proposal) items.push_back(proposal_item(*s.proposal, *s.candidate));
            if (kind == StateTag::GateEProposal) {
                env["context"]["loop_count"] = s.loop_count;
                env["context"]["loop_cap"] = s.config.value("loop_cap", 5);
                env["context"]["iterate_allowed"] = true;
            }
            break;
        case StateTag::GateFProblems:
            ops = {"add", "update", "delete"};
            items.push_back({{"id", "problem-statement"},
                             {"text", s.problem_statement},
                             {"agent_text", s.problem_statement_agent}});
            for (const auto& p : s.problems) {
                json item = p;
                item["id"] = p.problem_id;
                items.push_back(std::move(item));
            }
            break;
        case StateTag::GateGEvidence:
            ops = {"update", "delete"};
            for (const auto& e : s.evidence) {
                json item = e;
                item["id"] = e.evidence_id;
                for (const auto& p : s.problems)
                    if (p.problem_id == e.problem_id) item["problem"] = p.text;
                items.push_back(std::move(item));
            }
            break;
        case StateTag::GateHMethods:
            ops = {"add", "update", "delete"};
            for (const auto& m : s.methods) {
                json item = m;
                item["id"] = m.method_id;
                items.push_back(std::move(item));
            }
            break;
        default:
            break;
    }
    env["items"] = std::move(items);
    env["allowed_ops"] = std::move(ops);
    return env;
}

}  // namespace ideation::workflow
