#include "ideation/service/headless.hpp"

#include <ctime>
#include <fstream>
#include <map>

#include "ideation/corpus/corpus_file.hpp"
#include "ideation/error.hpp"
#include "ideation/session/export.hpp"
#include "ideation/service/runtime_factory.hpp"
#include "ideation/workflow/engine.hpp"

namespace ideation::service {

using nlohmann::json;
using workflow::StateTag;

namespace {

json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) fail(ErrorCode::Config, "cannot read " + p.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::Config, p.string() + ": " + e.what());
    }
}

std::chrono::system_clock::time_point parse_utc(const std::string& s) {
    std::tm tm{};
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &sec) != 6)
        fail(ErrorCode::Config, "clock_start must look like 2024-01-01T00:00:00Z, got '" + s + "'");
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = sec;
    return std::chrono::system_clock::from_time_t(timegm(&tm));
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::trunc | std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + p.string());
    out << content;
}

/// One line per binary verdict call, from the log.
std::string verdict_lines(const std::vector<session::LogEvent>& events) {
    std::map<std::string, json> calls;
    std::string out;
    for (const auto& e : events) {
        const auto& p = e.payload;
        if (e.kind == session::EventKind::LlmCall) {
            auto t = p.value("template_id", "");
            if (t == "P3" || t == "P10") calls[p.value("call_id", "")] = p;
            continue;
        }
        const bool answer = e.kind == session::EventKind::LlmResponse ||
                            (e.kind == session::EventKind::Error && p.contains("call_id"));
        if (!answer) continue;
        auto it = calls.find(p.value("call_id", ""));
        if (it == calls.end()) continue;
        json line = it->second.at("context");
        line["call_id"] = it->first;
        line["template_id"] = it->second.at("template_id");
        if (e.kind == session::EventKind::LlmResponse) {
            auto a = agents::parse_binary_answer(p.value("text", ""));
            line["verdict"] = agents::to_string(a.verdict);
            line["justification"] = a.justification.value_or("");
        } else {
            line["verdict"] = agents::to_string(agents::Verdict::Unanswerable);
            line["error"] = p.value("code", "") + ": " + p.value("message", "");
        }
        line.erase("chunk_ids");
        out += line.dump() + "\n";
        calls.erase(it);
    }
    return out;
}

}  // namespace

HeadlessResult run_headless(const ServiceConfig& base_config, const json& proposal, const json& script,
                            const std::filesystem::path& out) {
    HeadlessResult result;
    std::vector<std::shared_ptr<ScriptedProvider>> scripted;
    try {
        if (!script.is_object()) fail(ErrorCode::Config, "script must be a JSON object");
        const auto workflow_name = script.value("workflow", "motivation-validation");
        if (workflow_name != "motivation-validation" && workflow_name != "full")
            fail(ErrorCode::Config, "script.workflow must be \"motivation-validation\" or \"full\"");
        if (!proposal.is_object() || !proposal.contains("title") || !proposal.contains("abstract"))
            fail(ErrorCode::Config, "proposal must be {\"title\", \"abstract\"}");

        ServiceConfig config = base_config;
        if (script.contains("config")) {
            json cfg = config.engine;
            cfg.merge_patch(script.at("config"));
            cfg.get_to(config.engine);
        }
        if (config.corpus.empty()) fail(ErrorCode::Config, "no corpus configured");

        ServiceConfig provider_config = config;
        if (script.contains("fixtures")) provider_config.providers.clear();
        auto providers = make_providers(provider_config);
        scripted = providers.scripted;
        if (script.contains("fixtures")) {
            auto sp = std::make_shared<ScriptedProvider>("script", fixtures_from_json(script.at("fixtures")));
            scripted.push_back(sp);
            providers.agents->register_provider(sp, config.engine.max_fanout);
            providers.agents->configure({agents::Persona::Colleague, "script", "scripted", 0.0, 1024});
            providers.agents->configure({agents::Persona::Mentor, "script", "scripted", 0.0, 1024});
        }
        if (!providers.agents->ready()) fail(ErrorCode::Config, "no chat provider configured for the personas");
        providers.agents->set_sleeper([](std::chrono::milliseconds) {});

        auto loaded = corpus::open_corpus(config.corpus, *providers.embedder);

        std::filesystem::create_directories(out);
        auto session_dir = config.session_dir.value_or(out / "sessions");
        std::shared_ptr<session::Clock> clock;
        if (script.value("clock", "manual") == "system") {
            clock = std::make_shared<session::SystemClock>();
        } else {
            clock = std::make_shared<session::ManualClock>(
                parse_utc(script.value("clock_start", "2024-01-01T00:00:00Z")));
            providers.agents->set_timer([] { return std::chrono::steady_clock::time_point{}; });
        }
        auto store = std::make_shared<session::SessionStore>(session_dir, clock, config.durable);

        workflow::Engine engine({loaded.index, providers.embedder, providers.agents, store}, config.engine);
        std::optional<std::string> sid;
        if (script.contains("session_id")) sid = script.at("session_id").get<std::string>();
        auto s = engine.create_session(script.value("creator", "headless"), sid);
        result.session_id = s->id();
        result.log_path = store->log_path(s->id()).value_or(std::filesystem::path());

        std::map<std::string, std::vector<json>> decisions;
        if (script.contains("gates")) {
            for (const auto& g : script.at("gates")) decisions[g.at("kind").get<std::string>()].push_back(g);
        }
        std::map<std::string, std::size_t> used;

        auto drive = [&]() -> bool {
            for (;;) {
                auto env = s->envelope();
                if (env.is_null()) return true;
                auto kind = env.at("kind").get<std::string>();
                auto& queue = decisions[kind];
                auto& n = used[kind];
                if (n >= queue.size()) {
                    result.exit_code = kHeadlessNoDecision;
                    result.message = "no scripted decision for gate " + env.at("gate_id").get<std::string>();
                    return false;
                }
                const auto& d = queue[n++];
                workflow::GateSubmission sub;
                sub.gate_id = env.at("gate_id").get<std::string>();
                sub.edits = d.value("edits", json::array());
                sub.decision = d.value("decision", "accept");
                sub.iterate = d.value("iterate", false);
                engine.submit(*s, sub);
            }
        };

        engine.start_motivation_validation(*s, proposal.at("title").get<std::string>(),
                                           proposal.at("abstract").get<std::string>());
        bool finished = drive();
        if (finished && workflow_name == "full") {
            auto st = s->state();
            if (is_terminal(st.tag) && !st.ms_started) {
                engine.start_method_synthesis(*s);
                finished = drive();
            }
        }

        result.state = s->state();
        const auto events = s->log().events();
        const auto& st = result.state;
        json final_doc = {{"session_id", st.session_id},
                          {"state", workflow::to_string(st.tag)},
                          {"outcome", st.outcome},
                          {"proposal", st.proposal},
                          {"history", st.history},
                          {"notices", st.notices},
                          {"flags", st.flags}};
        write_file(out / "final_proposal.json", final_doc.dump(2) + "\n");
        write_file(out / "verdicts.jsonl", verdict_lines(events));
        write_file(out / "state.json", workflow::canonical(st) + "\n");
        {
            std::string log;
            for (const auto& e : events) log += session::canonical_line(e) + "\n";
            write_file(out / "session.log.jsonl", log);
        }
        if (!st.methods.empty()) write_file(out / "methods.json", json(st.methods).dump(2) + "\n");
        std::filesystem::create_directories(out / "exports");
        for (auto task : {session::ExportTask::MotivationRetrieval, session::ExportTask::ProposalRewrite,
                          session::ExportTask::ProblemRetrieval, session::ExportTask::MethodSynthesis}) {
            auto exp = session::export_dataset(events, task);
            std::ofstream f(out / "exports" / (std::string(session::to_string(task)) + ".jsonl"), std::ios::trunc);
            session::write_jsonl(f, exp.records);
        }

        std::size_t misses = 0;
        for (const auto& sp : scripted) misses += sp->misses();
        if (finished && misses > 0) {
            result.exit_code = kHeadlessFixtureMiss;
            result.message = std::to_string(misses) + " agent call(s) had no matching fixture";
        } else if (finished) {
            result.message = "session " + st.session_id + " finished in " + std::string(workflow::to_string(st.tag));
        }
    } catch (const Error& e) {
        result.message = e.what();
        switch (e.code()) {
            case ErrorCode::Config: result.exit_code = kHeadlessConfig; break;
            case ErrorCode::FixtureMiss: result.exit_code = kHeadlessFixtureMiss; break;
            default: result.exit_code = kHeadlessFailed; break;
        }
        if (result.exit_code == kHeadlessFailed) {
            std::size_t misses = 0;
            for (const auto& sp : scripted) misses += sp->misses();
            if (misses > 0) result.exit_code = kHeadlessFixtureMiss;
        }
    }
    return result;
}

HeadlessResult run_headless_files(const ServiceConfig& config, const std::filesystem::path& proposal,
                                  const std::filesystem::path& script, const std::filesystem::path& out) {
    try {
        return run_headless(config, read_json(proposal), read_json(script), out);
    } catch (const Error& e) {
        HeadlessResult r;
        r.exit_code = kHeadlessConfig;
        r.message = e.what();
        return r;
    }
}

}  // namespace ideation::service
