// Headless acceptance suite: one PASS/FAIL line per criterion, non-zero exit
// if any fails. Tolerances and time limits live in kLimits below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cases.hpp"
#include "ideation/agents/prompt_template.hpp"
#include "ideation/corpus/corpus_index.hpp"
#include "ideation/docproc/document.hpp"
#include "ideation/docproc/tokenizer.hpp"
#include "ideation/service/hash_embedding.hpp"
#include "ideation/session/replay.hpp"
#include "ideation/session/store.hpp"
#include "ideation/text.hpp"

using namespace ideation;
using workflow::StateTag;
using nlohmann::json;

namespace {

struct Limits {
    double retrieval_seconds = 10.0;
    double chunker_seconds = 5.0;
    double golden_a_seconds = 30.0;
    double golden_b_seconds = 60.0;
    double score_tolerance = 1e-12;  // oracle and index both accumulate in double
    std::size_t chunk_paragraphs = 1000;
    std::size_t queries_per_corpus = 25;
    int loop_cap = 5;
};
constexpr Limits kLimits;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Collects reasons a check failed; an empty list is a pass.
struct Check {
    std::vector<std::string> problems;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    }
    template <typename A, typename B>
    void equal(const A& got, const B& want, const std::string& what) {
        if (!(got == want)) {
            std::ostringstream s;
            s << what << ": got " << got << ", want " << want;
            problems.push_back(s.str());
        }
    }
};

std::size_t count_if_yes(const std::vector<workflow::ValidationVerdict>& vs, bool active_only) {
    return static_cast<std::size_t>(std::count_if(vs.begin(), vs.end(), [&](const auto& v) {
        return v.answer.verdict == agents::Verdict::Yes && (!active_only || workflow::active(v.status));
    }));
}

std::vector<session::LogEvent> log_of(const support::CaseRun& run) {
    return session::read_log_file(run.out / "session.log.jsonl").events;
}

std::size_t count_events(const std::vector<session::LogEvent>& log, session::EventKind kind,
                         const std::string& template_id = {}) {
    return static_cast<std::size_t>(std::count_if(log.begin(), log.end(), [&](const session::LogEvent& e) {
        return e.kind == kind && (template_id.empty() || e.payload.value("template_id", "") == template_id);
    }));
}

std::size_t gate_opens(const std::vector<session::LogEvent>& log, const std::string& kind) {
    return static_cast<std::size_t>(std::count_if(log.begin(), log.end(), [&](const session::LogEvent& e) {
        return e.kind == session::EventKind::GateOpen && e.payload.value("kind", "") == kind;
    }));
}

// --- retrieval -------------------------------------------------------------

double plain_cosine(const std::vector<float>& a, const std::vector<float>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

Check retrieval_oracle() {
    Check c;
    const auto t0 = Clock::now();
    service::HashEmbeddingProvider emb;
    std::size_t compared = 0;
    std::uint32_t seed = 100;
    for (std::size_t n : {100u, 500u, 1000u}) {
        auto docs = support::random_corpus(n, seed++);
        corpus::CorpusIndex idx;
        idx.ingest(docs, emb);
        std::vector<std::vector<float>> vecs;
        for (const auto& d : docs) {
            corpus::EmbeddingInput in{d.title, d.abstract};
            vecs.push_back(emb.embed(std::span(&in, 1)).front());
        }
        for (const auto& q : support::random_queries(kLimits.queries_per_corpus, seed++)) {
            corpus::EmbeddingInput qi{q, ""};
            auto qv = emb.embed(std::span(&qi, 1)).front();
            std::vector<std::pair<double, std::string>> all;
            for (std::size_t i = 0; i < docs.size(); ++i) all.emplace_back(plain_cosine(qv, vecs[i]), docs[i].paper_id);
            std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
            });
            for (std::size_t k : {1u, 10u, 50u}) {
                auto hits = idx.retrieve_topk(q, k, emb);
                ++compared;
                if (hits.size() != std::min(k, docs.size())) {
                    c.problems.push_back("size mismatch n=" + std::to_string(n) + " k=" + std::to_string(k));
                    continue;
                }
                for (std::size_t r = 0; r < hits.size(); ++r) {
                    if (hits[r].paper_id != all[r].second ||
                        std::abs(hits[r].score - all[r].first) > kLimits.score_tolerance || hits[r].rank != r + 1) {
                        c.problems.push_back("n=" + std::to_string(n) + " k=" + std::to_string(k) + " rank " +
                                             std::to_string(r + 1) + ": " + hits[r].paper_id + " vs " + all[r].second);
                        break;
                    }
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    c.expect(secs < kLimits.retrieval_seconds, "took " + std::to_string(secs) + " s");
    c.detail = std::to_string(compared) + " queries vs exhaustive scan, " + std::to_string(secs) + " s";
    return c;
}

// --- chunking --------------------------------------------------------------

std::vector<std::string> words_of(const std::string& s) {
    std::istringstream in(s);
    return {std::istream_iterator<std::string>(in), std::istream_iterator<std::string>()};
}

Check chunker_round_trip() {
    Check c;
    const auto t0 = Clock::now();
    auto tokenizer = docproc::make_tokenizer("whitespace");
    std::size_t violations = 0, pieces = 0;
    const auto paragraphs = support::random_paragraphs(kLimits.chunk_paragraphs, 2024);
    for (const auto& p : paragraphs) {
        const auto original = words_of(p);
        for (std::size_t budget : {8u, 50u, 512u}) {
            std::string joined;
            for (const auto& piece : docproc::split_to_fit(p, budget, *tokenizer)) {
                ++pieces;
                const auto w = words_of(piece.text);
                if (w.size() != piece.token_count || (!piece.oversize && piece.token_count > budget) ||
                    (piece.oversize && w.size() != 1) || w.empty())
                    ++violations;
                if (!joined.empty()) joined += ' ';
                joined += piece.text;
            }
            if (words_of(joined) != original) ++violations;
        }
    }
    const double secs = seconds_since(t0);
    c.equal(violations, std::size_t{0}, "violations");
    c.expect(secs < kLimits.chunker_seconds, "took " + std::to_string(secs) + " s");
    c.detail = std::to_string(paragraphs.size()) + " paragraphs x 3 budgets, " + std::to_string(pieces) +
               " pieces, " + std::to_string(violations) + " violations, " + std::to_string(secs) + " s";
    return c;
}

// --- prompts ---------------------------------------------------------------

/// Left-to-right, single pass: substituted values are not rescanned.
std::string substitute(const std::string& text, const agents::Bindings& b) {
    std::string out;
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '{') {
            auto close = text.find('}', i);
            if (close != std::string::npos) {
                auto it = b.find(text.substr(i + 1, close - i - 1));
                if (it != b.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += text[i++];
    }
    return out;
}

Check prompt_goldens() {
    Check c;
    std::size_t passed = 0;
    const agents::TemplateId ids[] = {agents::TemplateId::P1, agents::TemplateId::P2,  agents::TemplateId::P3,
                                      agents::TemplateId::P4, agents::TemplateId::P5,  agents::TemplateId::P6,
                                      agents::TemplateId::P7, agents::TemplateId::P8,  agents::TemplateId::P9,
                                      agents::TemplateId::P10, agents::TemplateId::P11};
    for (auto id : ids) {
        const auto name = std::string(agents::to_string(id));
        std::ifstream in(std::string(IDEATION_GOLDEN_DIR) + "/prompts/" + name + ".txt", std::ios::binary);
        std::stringstream golden;
        golden << in.rdbuf();
        agents::Bindings b;
        for (const auto& slot : agents::get_template(id).placeholders()) b[slot] = "[" + slot + " {value}]";
        if (b.count("n_methods")) b["n_methods"] = "3";
        const auto rendered = agents::format_transcript(agents::render_prompt(id, b)) + "\n";
        if (in && rendered == substitute(golden.str(), b))
            ++passed;
        else
            c.problems.push_back(name + " differs");
    }
    c.detail = std::to_string(passed) + "/11 byte-identical";
    return c;
}

// --- scripted sessions -----------------------------------------------------

Check golden_replay_a(const std::filesystem::path& dir) {
    Check c;
    const auto t0 = Clock::now();
    auto run = support::run_case(support::golden_peer_review(), dir);
    const auto& s = run.result.state;
    c.equal(run.result.exit_code, 0, "exit code (" + run.result.message + ")");
    c.equal(s.papers.size(), std::size_t{50}, "retrieved");
    c.equal(s.questions.size(), std::size_t{1}, "questions");
    c.equal(count_if_yes(s.verdicts, false), std::size_t{5}, "Yes verdicts");
    c.equal(count_if_yes(s.verdicts, true), std::size_t{4}, "Yes after Gate C");
    c.equal(s.gap_papers.size(), std::size_t{4}, "gap groups");
    c.expect(s.proposal && s.proposal->version > 1, "rewrite adopted");
    c.equal(std::string(workflow::to_string(s.tag)), std::string("Done"), "final state");
    auto replayed = session::replay_file(run.out / "session.log.jsonl");
    c.expect(!replayed.diagnostic, "replay diagnostic");
    c.expect(workflow::canonical(replayed.state) == workflow::canonical(s), "replay differs from live state");
    const double secs = seconds_since(t0);
    c.expect(secs < kLimits.golden_a_seconds, "took " + std::to_string(secs) + " s");
    c.detail = std::to_string(s.papers.size()) + " retrieved, " + std::to_string(s.questions.size()) + " question, " +
               std::to_string(count_if_yes(s.verdicts, false)) + " Yes -> " +
               std::to_string(count_if_yes(s.verdicts, true)) + ", " + std::to_string(s.gap_papers.size()) +
               " gap groups, " + std::string(workflow::to_string(s.tag)) + ", replay " +
               (workflow::canonical(replayed.state) == workflow::canonical(s) ? "bit-exact" : "DIFFERS") + ", " +
               std::to_string(secs) + " s";
    return c;
}

Check golden_replay_b(const std::filesystem::path& dir) {
    Check c;
    const auto t0 = Clock::now();
    auto run = support::run_case(support::golden_qa_metric(), dir);
    const auto& s = run.result.state;
    const auto log = log_of(run);
    c.equal(run.result.exit_code, 0, "exit code (" + run.result.message + ")");

    // State at the end of motivation validation.
    std::optional<workflow::SessionState> mv;
    for (std::size_t i = 0; i < log.size(); ++i)
        if (log[i].kind == session::EventKind::StateTransition && log[i].payload.value("to", "") == "MV-Validated")
            mv = session::replay_events(std::span(log.data(), i + 1)).state;
    c.expect(mv.has_value(), "never reached MV-Validated");
    if (mv) {
        c.equal(mv->papers.size(), std::size_t{50}, "retrieved");
        c.equal(mv->questions.size(), std::size_t{1}, "questions");
        c.equal(count_if_yes(mv->verdicts, false), std::size_t{0}, "Yes verdicts");
        c.equal(mv->pass, 1, "passes");
    }
    c.equal(gate_opens(log, "GateC-Verdicts"), std::size_t{0}, "Gate C openings");

    std::size_t similar = 0, subtask = 0;
    for (const auto& p : s.problems)
        if (workflow::active(p.status)) (p.kind == workflow::ProblemKind::Similar ? similar : subtask)++;
    const auto accepted_evidence = std::count_if(s.evidence.begin(), s.evidence.end(),
                                                 [](const auto& e) { return e.accepted; });
    const auto accepted_methods = std::count_if(s.methods.begin(), s.methods.end(),
                                                [](const auto& m) { return m.accepted; });
    c.equal(similar, std::size_t{4}, "similar problems");
    c.equal(subtask, std::size_t{2}, "sub-problems");
    c.equal(s.method_papers.size(), std::size_t{40}, "deduplicated papers");
    c.equal(s.evidence.size(), std::size_t{17}, "evidence");
    c.equal(accepted_evidence, 11, "accepted evidence");
    c.equal(accepted_methods, 10, "methods");
    c.expect(!s.history.empty() && s.history.back().provenance != workflow::Provenance::Original,
             "final rewrite adopted");
    c.equal(std::string(workflow::to_string(s.tag)), std::string("Done"), "final state");
    const double secs = seconds_since(t0);
    c.expect(secs < kLimits.golden_b_seconds, "took " + std::to_string(secs) + " s");
    c.detail = "MV-Validated in " + std::to_string(mv ? mv->pass : 0) + " pass; " + std::to_string(similar) + "+" +
               std::to_string(subtask) + " problems, " + std::to_string(s.method_papers.size()) + " papers, " +
               std::to_string(s.evidence.size()) + " evidence, " + std::to_string(accepted_evidence) +
               " accepted, " + std::to_string(accepted_methods) + " methods, " +
               std::string(workflow::to_string(s.tag)) + ", " + std::to_string(secs) + " s";
    return c;
}

Check unanswerability(const std::filesystem::path& dir) {
    Check c;
    auto run = support::run_case(
        support::uniform_answer_case("Unanswerable. None of the paragraphs bear on the question."), dir);
    const auto& s = run.result.state;
    const auto log = log_of(run);
    c.equal(run.result.exit_code, 0, "exit code (" + run.result.message + ")");
    const auto unanswerable = std::count_if(s.verdicts.begin(), s.verdicts.end(), [](const auto& v) {
        return v.answer.verdict == agents::Verdict::Unanswerable;
    });
    c.equal(s.verdicts.size(), std::size_t{50}, "verdicts");
    c.equal(unanswerable, 50, "Unanswerable verdicts");
    c.equal(count_if_yes(s.verdicts, false), std::size_t{0}, "Gate C payload items");
    c.equal(gate_opens(log, "GateC-Verdicts"), std::size_t{0}, "Gate C openings");
    c.equal(count_events(log, session::EventKind::LlmResponse, ""), count_events(log, session::EventKind::LlmCall),
            "answered calls");
    std::size_t logged = 0;
    const auto verdicts_text = support::read_text(run.out / "verdicts.jsonl");
    for (auto line : text::split_lines(verdicts_text))
        if (!line.empty() && json::parse(line).value("verdict", "") == "Unanswerable") ++logged;
    c.equal(logged, std::size_t{50}, "verdicts in the log");
    c.detail = std::to_string(unanswerable) + "/50 Unanswerable, Gate C payload " +
               std::to_string(count_if_yes(s.verdicts, false)) + " items, " + std::to_string(logged) +
               " verdicts logged";
    return c;
}

Check termination(const std::filesystem::path& dir) {
    Check c;
    auto no = support::run_case(support::uniform_answer_case("No."), dir / "no");
    c.equal(no.result.exit_code, 0, "all-No exit code (" + no.result.message + ")");
    c.equal(std::string(workflow::to_string(no.result.state.tag)), std::string("MV-Validated"), "all-No state");
    c.equal(no.result.state.pass, 1, "all-No passes");

    auto yes = support::run_case(support::always_yes_case(kLimits.loop_cap), dir / "yes");
    const auto& s = yes.result.state;
    c.equal(yes.result.exit_code, 0, "always-Yes exit code (" + yes.result.message + ")");
    c.equal(std::string(workflow::to_string(s.tag)), std::string("Done"), "always-Yes state");
    c.equal(s.outcome, std::string("loop-cap"), "always-Yes outcome");
    c.equal(s.loop_count, kLimits.loop_cap, "revalidation loops");
    c.equal(gate_opens(log_of(yes), "GateA-Papers"), static_cast<std::size_t>(kLimits.loop_cap + 1),
            "validation passes");
    c.detail = "all-No: " + std::string(workflow::to_string(no.result.state.tag)) + " after " +
               std::to_string(no.result.state.pass) + " pass; always-Yes: " + s.outcome + " after " +
               std::to_string(s.loop_count) + " loops (" + std::to_string(s.pass) + " passes)";
    return c;
}

Check fail_soft(const std::filesystem::path& dir) {
    Check c;
    auto run = support::run_case(support::fail_soft_case(), dir);
    const auto& s = run.result.state;
    const auto log = log_of(run);
    c.equal(run.result.exit_code, 0, "exit code (" + run.result.message + ")");
    c.expect(workflow::is_terminal(s.tag), std::string("not terminal: ") + std::string(workflow::to_string(s.tag)));
    std::size_t with_error = 0;
    for (const auto& v : s.verdicts)
        if (v.error) {
            ++with_error;
            c.expect(v.answer.verdict == agents::Verdict::Unanswerable, v.item_id() + " is not Unanswerable");
        }
    c.equal(s.verdicts.size(), std::size_t{50}, "verdicts");
    c.equal(with_error, std::size_t{5}, "timed-out pairs");
    c.equal(count_if_yes(s.verdicts, false), std::size_t{2}, "Yes verdicts");
    c.expect(count_events(log, session::EventKind::Error) >= 5, "error events");
    c.detail = std::to_string(with_error) + "/50 pairs timed out -> Unanswerable with error; finished in " +
               std::string(workflow::to_string(s.tag));
    return c;
}

}  // namespace

int main() {
    support::TempDir dir("ideation-acceptance");
    const std::vector<std::pair<std::string, std::function<Check()>>> checks = {
        {"retrieval-oracle-equivalence", retrieval_oracle},
        {"chunker-round-trip", chunker_round_trip},
        {"prompt-golden-files", prompt_goldens},
        {"golden-replay-a-peer-review", [&] { return golden_replay_a(dir / "a"); }},
        {"golden-replay-b-qa-metric", [&] { return golden_replay_b(dir / "b"); }},
        {"unanswerability", [&] { return unanswerability(dir / "u"); }},
        {"termination", [&] { return termination(dir / "t"); }},
        {"fail-soft", [&] { return fail_soft(dir / "f"); }},
    };
    int failed = 0;
    for (const auto& [name, fn] : checks) {
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.problems.push_back(std::string("threw: ") + e.what());
        }
        const bool ok = c.problems.empty();
        failed += !ok;
        std::cout << (ok ? "PASS " : "FAIL ") << name << "  " << c.detail << "\n";
        for (const auto& p : c.problems) std::cout << "       - " << p << "\n";
    }
    std::cout << (checks.size() - static_cast<std::size_t>(failed)) << "/" << checks.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
