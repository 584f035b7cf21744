// ideation: command-line front end (serve, ingest, run, replay, export, audit).

#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ideation/corpus/corpus_file.hpp"
#include "ideation/error.hpp"
#include "ideation/service/config.hpp"
#include "ideation/service/headless.hpp"
#include "ideation/service/runtime_factory.hpp"
#include "ideation/service/server.hpp"
#include "ideation/session/export.hpp"
#include "ideation/session/replay.hpp"
#include "ideation/workflow/audit.hpp"

namespace {

using namespace ideation;
using nlohmann::json;

struct Overrides {
    std::string config;
    std::string corpus;
    std::string session_dir;
    std::optional<std::size_t> k_papers, k_per_problem, k_small, max_tokens, n_methods;
    std::optional<int> loop_cap;

    void attach(CLI::App& app) {
        app.add_option("--config", config, "JSON config file");
        app.add_option("--corpus", corpus, "corpus JSONL or snapshot (overrides the config)");
        app.add_option("--session-dir", session_dir, "directory for session logs");
        app.add_option("--k-papers", k_papers, "stage-1 papers per proposal");
        app.add_option("--k-per-problem", k_per_problem, "stage-1 papers per related problem");
        app.add_option("--k-small", k_small, "stage-2 chunks per (question, paper)");
        app.add_option("--max-tokens", max_tokens, "chunk token budget");
        app.add_option("--loop-cap", loop_cap, "maximum revalidation loops");
        app.add_option("--n-methods", n_methods, "methods requested from the mentor");
    }

    service::ServiceConfig load() const {
        service::ServiceConfig c;
        if (!config.empty()) c = service::load_config(config);
        if (!corpus.empty()) c.corpus = corpus;
        if (!session_dir.empty()) c.session_dir = session_dir;
        if (k_papers) c.engine.k_papers = *k_papers;
        if (k_per_problem) c.engine.k_per_problem = *k_per_problem;
        if (k_small) c.engine.k_small = *k_small;
        if (max_tokens) c.engine.max_tokens = *max_tokens;
        if (loop_cap) c.engine.loop_cap = *loop_cap;
        if (n_methods) c.engine.n_methods = *n_methods;
        json check = c.engine;
        check.get_to(c.engine);
        return c;
    }
};

int serve(const Overrides& o, std::optional<int> port) {
    auto cfg = o.load();
    if (port) cfg.server.port = *port;
    if (cfg.corpus.empty()) fail(ErrorCode::Config, "no corpus configured (use --corpus or \"corpus\")");
    auto providers = service::make_providers(cfg);
    auto loaded = corpus::open_corpus(cfg.corpus, *providers.embedder);
    std::cerr << "corpus: " << loaded.report.count << " papers, " << loaded.report.skipped << " skipped\n";
    auto store = std::make_shared<session::SessionStore>(cfg.session_dir.value_or("sessions"),
                                                         std::make_shared<session::SystemClock>(), cfg.durable);
    auto engine = std::make_shared<workflow::Engine>(
        workflow::EngineDeps{loaded.index, providers.embedder, providers.agents, store}, cfg.engine);
    service::ServerOptions opts{cfg.server.host, cfg.server.port, {}};
    if (!cfg.server.token_env.empty()) opts.token = service::require_env(cfg.server.token_env, "API bearer token");

    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    service::ApiServer server(engine, providers.embedder, providers.agents, opts);
    int bound = server.start();
    std::cerr << "listening on " << opts.host << ":" << bound << "\n";
    std::jthread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    });
    server.wait();
    return 0;
}

int ingest(const Overrides& o, const std::string& snapshot) {
    auto cfg = o.load();
    if (cfg.corpus.empty()) fail(ErrorCode::Config, "no corpus given (use --corpus)");
    auto embedder = service::make_embedder(cfg.embedding);
    auto loaded = corpus::open_corpus(cfg.corpus, *embedder);
    std::cout << json(loaded.report).dump(2) << "\n";
    if (!snapshot.empty()) {
        std::ofstream out(snapshot, std::ios::trunc);
        if (!out) fail(ErrorCode::Io, "cannot write " + snapshot);
        loaded.index->save_snapshot(out);
    }
    return 0;
}

int run(const Overrides& o, const std::string& proposal, const std::string& script, const std::string& out) {
    auto cfg = o.load();
    auto r = service::run_headless_files(cfg, proposal, script, out);
    (r.exit_code == 0 ? std::cout : std::cerr) << r.message << "\n";
    return r.exit_code;
}

std::vector<session::LogEvent> read_events(const std::string& path, bool& clean) {
    auto read = session::read_log_file(path);
    clean = !read.diagnostic;
    if (read.diagnostic)
        std::cerr << path << ":" << read.diagnostic->line << ": " << read.diagnostic->reason << "\n";
    return read.events;
}

int replay(const std::string& log, const std::string& state_out) {
    auto r = session::replay_file(log);
    std::cout << "applied " << r.applied << " events; state " << workflow::to_string(r.state.tag) << "\n";
    if (!state_out.empty()) {
        std::ofstream out(state_out, std::ios::trunc);
        out << workflow::canonical(r.state) << "\n";
    }
    if (r.diagnostic) {
        std::cerr << log << ":" << r.diagnostic->line << ": " << r.diagnostic->reason << "\n";
        return 1;
    }
    return 0;
}

int export_task(const std::string& log, const std::string& task, const std::string& out) {
    bool clean = true;
    auto events = read_events(log, clean);
    auto result = session::export_dataset(events, session::export_task_from_string(task));
    if (result.notice) std::cerr << *result.notice << "\n";
    if (out.empty() || out == "-") {
        session::write_jsonl(std::cout, result.records);
    } else {
        std::ofstream f(out, std::ios::trunc);
        if (!f) fail(ErrorCode::Io, "cannot write " + out);
        session::write_jsonl(f, result.records);
    }
    return clean ? 0 : 1;
}

int audit(const std::string& log) {
    bool clean = true;
    auto events = read_events(log, clean);
    auto report = workflow::audit_log(events);
    std::cout << "events " << report.events << ", calls " << report.llm_calls << ", responses "
              << report.llm_responses << ", call errors " << report.call_errors << "\n";
    for (const auto& v : report.violations) std::cout << "event " << v.event_id << ": " << v.reason << "\n";
    return clean && report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Human-in-the-loop research ideation: corpus retrieval, agent workflows, session logs"};
    app.require_subcommand(1);

    Overrides serve_o, ingest_o, run_o;
    std::optional<int> port;
    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP API");
    serve_o.attach(*serve_cmd);
    serve_cmd->add_option("--port", port, "listen port (overrides the config)");

    std::string snapshot;
    auto* ingest_cmd = app.add_subcommand("ingest", "embed a corpus and report what was indexed");
    ingest_o.attach(*ingest_cmd);
    ingest_cmd->add_option("--snapshot", snapshot, "write an embedding snapshot here");

    std::string proposal, script, out_dir;
    auto* run_cmd = app.add_subcommand("run", "run a scripted session headlessly");
    run_o.attach(*run_cmd);
    run_cmd->add_option("--proposal", proposal, "proposal JSON {title, abstract}")->required();
    run_cmd->add_option("--script", script, "gate decisions and fixtures")->required();
    run_cmd->add_option("--out", out_dir, "output directory")->required();

    std::string log, state_out, task, export_out;
    auto* replay_cmd = app.add_subcommand("replay", "rebuild session state from a log");
    replay_cmd->add_option("--log", log, "session log (JSON lines)")->required();
    replay_cmd->add_option("--state-out", state_out, "write the canonical state here");

    auto* export_cmd = app.add_subcommand("export", "derive a dataset from a finished session log");
    export_cmd->add_option("--log", log, "session log")->required();
    export_cmd->add_option("--task", task,
                           "motivation-retrieval | proposal-rewrite | problem-retrieval | method-synthesis")
        ->required();
    export_cmd->add_option("--out", export_out, "output JSONL (default stdout)");

    auto* audit_cmd = app.add_subcommand("audit", "check gate coverage and call completeness of a log");
    audit_cmd->add_option("--log", log, "session log")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd) return serve(serve_o, port);
        if (*ingest_cmd) return ingest(ingest_o, snapshot);
        if (*run_cmd) return run(run_o, proposal, script, out_dir);
        if (*replay_cmd) return replay(log, state_out);
        if (*export_cmd) return export_task(log, task, export_out);
        if (*audit_cmd) return audit(log);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return e.code() == ErrorCode::Config ? 2 : 1;
    }
    return 0;
}
