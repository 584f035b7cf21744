#include "ideation/service/server.hpp"

#include <condition_variable>
#include <list>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "httplib.h"
#include "ideation/corpus/corpus_file.hpp"
#include "ideation/error.hpp"
#include "ideation/session/export.hpp"

namespace ideation::service {

using nlohmann::json;

namespace {

int http_status(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::ParseError:
        case ErrorCode::Config:
            return 400;
        case ErrorCode::NotFound:
            return 404;
        case ErrorCode::PreconditionFailed:
        case ErrorCode::StaleGate:
        case ErrorCode::SessionClosed:
            return 409;
        case ErrorCode::ProviderUnreachable:
        case ErrorCode::ProviderRejected:
        case ErrorCode::BudgetExhausted:
        case ErrorCode::FixtureMiss:
            return 502;
        case ErrorCode::Timeout:
            return 504;
        default:
            return 500;
    }
}

json error_body(ErrorCode c, const std::string& msg) {
    return {{"error", {{"code", to_string(c)}, {"message", msg}}}};
}

bool text_empty(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
    }
}

struct Job {
    std::string job_id;
    std::string session_id;
    std::string kind;
    std::string status = "running";  // running | succeeded | failed
    json error;
    std::string final_state;
};

void to_json(json& j, const Job& job) {
    j = {{"job_id", job.job_id},
         {"session_id", job.session_id},
         {"kind", job.kind},
         {"status", job.status},
         {"error", job.error},
         {"state", job.final_state}};
}

}  // namespace

struct ApiServer::Impl {
    std::shared_ptr<workflow::Engine> engine;
    std::shared_ptr<corpus::EmbeddingProvider> embedder;
    std::shared_ptr<const agents::AgentRuntime> runtime;
    ServerOptions options;
    httplib::Server http;
    std::thread listener;
    int bound_port = 0;

    std::mutex mutex;
    std::condition_variable jobs_cv;
    std::map<std::string, std::shared_ptr<workflow::LiveSession>> sessions;
    std::map<std::string, Job> jobs;
    std::map<std::string, std::string> active_job;  // session -> job
    std::list<std::jthread> workers;
    std::uint64_t job_counter = 0;
    std::size_t running = 0;

    std::mutex stop_mutex;
    std::condition_variable stop_cv;
    bool stopped = false;

    std::shared_ptr<workflow::LiveSession> session(const std::string& id) {
        {
            std::lock_guard lock(mutex);
            auto it = sessions.find(id);
            if (it != sessions.end()) return it->second;
        }
        if (!engine->store().record(id)) fail(ErrorCode::NotFound, "no session '" + id + "'");
        auto s = engine->resume_session(id);
        std::lock_guard lock(mutex);
        return sessions.try_emplace(id, std::move(s)).first->second;
    }

    std::string launch(const std::shared_ptr<workflow::LiveSession>& s, const std::string& kind,
                       std::function<void()> work) {
        std::lock_guard lock(mutex);
        if (auto it = active_job.find(s->id()); it != active_job.end())
            fail(ErrorCode::PreconditionFailed, "session " + s->id() + " is busy with job " + it->second);
        Job job;
        job.job_id = "j" + std::to_string(++job_counter);
        job.session_id = s->id();
        job.kind = kind;
        auto id = job.job_id;
        jobs[id] = job;
        active_job[s->id()] = id;
        ++running;
        workers.emplace_back([this, s, id, work = std::move(work)] {
            json error;
            try {
                work();
            } catch (const Error& e) {
                error = error_body(e.code(), e.what())["error"];
            } catch (const std::exception& e) {
                error = error_body(ErrorCode::Io, e.what())["error"];
            }
            std::lock_guard lock(mutex);
            auto& j = jobs[id];
            j.status = error.is_null() ? "succeeded" : "failed";
            j.error = error;
            j.final_state = std::string(workflow::to_string(s->state().tag));
            active_job.erase(s->id());
            --running;
            jobs_cv.notify_all();
        });
        return id;
    }

    void guard(httplib::Response& res, const std::function<void()>& fn) {
        try {
            fn();
        } catch (const Error& e) {
            reply(res, http_status(e.code()), error_body(e.code(), e.what()));
        } catch (const std::exception& e) {
            reply(res, 500, error_body(ErrorCode::Io, e.what()));
        }
    }

    void routes();
};

void ApiServer::Impl::routes() {
    http.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
        if (options.token.empty() || req.path == "/health") return httplib::Server::HandlerResponse::Unhandled;
        if (req.get_header_value("Authorization") != "Bearer " + options.token) {
            reply(res, 401, error_body(ErrorCode::PreconditionFailed, "missing or wrong bearer token"));
            return httplib::Server::HandlerResponse::Handled;
        }
        return httplib::Server::HandlerResponse::Unhandled;
    });

    http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        auto c = engine->corpus();
        std::size_t n_sessions = 0;
        {
            std::lock_guard lock(mutex);
            n_sessions = sessions.size();
        }
        reply(res, 200,
              {{"status", "ok"},
               {"corpus", {{"size", c->size()}, {"model_id", c->model_id()}}},
               {"agents_ready", runtime->ready()},
               {"providers", runtime->provider_ids()},
               {"live_sessions", n_sessions}});
    });

    http.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
        guard(res, [&] {
            json out = json::array();
            for (const auto& r : engine->store().list()) out.push_back(r);
            reply(res, 200, {{"sessions", out}});
        });
    });

    http.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            auto body = parse_body(req);
            auto creator = body.value("creator", "researcher");
            std::optional<std::string> sid;
            if (body.contains("session_id")) sid = body.at("session_id").get<std::string>();
            std::optional<workflow::EngineConfig> cfg;
            if (body.contains("config")) {
                json merged = engine->defaults();
                merged.merge_patch(body.at("config"));
                cfg = merged.get<workflow::EngineConfig>();
            }
            auto s = engine->create_session(creator, sid, cfg);
            {
                std::lock_guard lock(mutex);
                sessions[s->id()] = s;
            }
            reply(res, 201, {{"session_id", s->id()}, {"state", workflow::to_string(s->state().tag)}});
        });
    });

    http.Post(R"(/sessions/([^/]+)/proposal)", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            auto s = session(req.matches[1]);
            auto body = parse_body(req);
            if (!body.contains("title") || !body.contains("abstract") || !body["title"].is_string() ||
                !body["abstract"].is_string())
                fail(ErrorCode::InvalidArgument, "body must be {\"title\": string, \"abstract\": string}");
            auto title = body["title"].get<std::string>();
            auto abstract = body["abstract"].get<std::string>();
            auto st = s->state();
            if (st.tag != workflow::StateTag::MvStart || st.proposal)
                fail(ErrorCode::PreconditionFailed, "session " + s->id() + " already has a proposal");
            if (text_empty(title) || text_empty(abstract))
                fail(ErrorCode::PreconditionFailed, "proposal title and abstract must be non-empty");
            auto job = launch(s, "motivation-validation",
                              [this, s, title, abstract] { engine->start_motivation_validation(*s, title, abstract); });
            reply(res, 202, {{"job_id", job}, {"session_id", s->id()}});
        });
    });

    http.Post(R"(/sessions/([^/]+)/method-synthesis)", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            auto s = session(req.matches[1]);
            auto st = s->state();
            const bool allowed =
                st.tag == workflow::StateTag::MvValidated || (st.tag == workflow::StateTag::Done && !st.ms_started);
            if (!allowed || !st.proposal)
                fail(ErrorCode::PreconditionFailed, "method synthesis needs a validated or accepted proposal");
            auto job = launch(s, "method-synthesis", [this, s] { engine->start_method_synthesis(*s); });
            reply(res, 202, {{"job_id", job}, {"session_id", s->id()}});
        });
    });

    http.Get(R"(/sessions/([^/]+)/gate)", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            auto s = session(req.matches[1]);
            auto env = s->envelope();
            reply(res, 200, {{"session_id", s->id()},
                             {"state", workflow::to_string(s->state().tag)},
                             {"busy", s->busy()},
                             {"gate", env}});
        });
    });

    http.Post(R"(/sessions/([^/]+)/gate)", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            auto s = session(req.matches[1]);
            auto sub = workflow::submission_from_json(parse_body(req));
            {
                std::lock_guard lock(mutex);
                if (active_job.count(s->id()))
                    fail(ErrorCode::StaleGate, "session " + s->id() + " is busy; gate " + sub.gate_id +
                                                   " cannot be resolved now");
            }
            try {
                engine->resolve_gate(*s, sub);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::PreconditionFailed) {
                    reply(res, 422, error_body(e.code(), e.what()));
                    return;
                }
                throw;
            }
            auto job = launch(s, "advance", [this, s] { engine->advance(*s); });
            reply(res, 202, {{"job_id", job}, {"session_id", s->id()}});
        });
    });

    http.Post(R"(/sessions/([^/]+)/resume)", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            auto s = session(req.matches[1]);
            auto job = launch(s, "advance", [this, s] { engine->advance(*s); });
            reply(res, 202, {{"job_id", job}, {"session_id", s->id()}});
        });
    });

    http.Get(R"(/sessions/([^/]+)/state)", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] { reply(res, 200, json(session(req.matches[1])->state())); });
    });

    http.Get(R"(/sessions/([^/]+)/artifacts)", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            auto st = session(req.matches[1])->state();
            reply(res, 200,
                  {{"session_id", st.session_id},
                   {"state", workflow::to_string(st.tag)},
                   {"outcome", st.outcome},
                   {"proposal", st.proposal},
                   {"history", st.history},
                   {"candidate", st.candidate},
                   {"papers", st.papers},
                   {"motivation", st.motivation},
                   {"questions", st.questions},
                   {"verdicts", st.verdicts},
                   {"gaps", st.gaps},
                   {"problem_statement", st.problem_statement},
                   {"problems", st.problems},
                   {"evidence", st.evidence},
                   {"methods", st.methods},
                   {"flags", st.flags},
                   {"notices", st.notices}});
        });
    });

    http.Get(R"(/sessions/([^/]+)/log)", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            std::string out;
            for (const auto& e : session(req.matches[1])->log().events()) out += session::canonical_line(e) + "\n";
            res.status = 200;
            res.set_content(out, "application/x-ndjson");
        });
    });

    http.Get(R"(/sessions/([^/]+)/export)", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            auto s = session(req.matches[1]);
            if (!req.has_param("task")) fail(ErrorCode::InvalidArgument, "query parameter 'task' is required");
            auto task = session::export_task_from_string(req.get_param_value("task"));
            auto result = session::export_dataset(s->log().events(), task);
            reply(res, 200, {{"task", session::to_string(task)}, {"records", result.records}, {"notice", result.notice}});
        });
    });

    http.Get(R"(/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            std::lock_guard lock(mutex);
            auto it = jobs.find(req.matches[1]);
            if (it == jobs.end()) fail(ErrorCode::NotFound, "no job '" + std::string(req.matches[1]) + "'");
            reply(res, 200, json(it->second));
        });
    });

    http.Post("/admin/ingest", [this](const httplib::Request& req, httplib::Response& res) {
        guard(res, [&] {
            auto body = parse_body(req);
            std::shared_ptr<corpus::CorpusIndex> next;
            corpus::IngestReport report;
            if (body.contains("path")) {
                auto loaded = corpus::open_corpus(body.at("path").get<std::string>(), *embedder);
                next = loaded.index;
                report = loaded.report;
            } else if (body.contains("records")) {
                std::vector<corpus::PaperRecord> records;
                try {
                    records = body.at("records").get<std::vector<corpus::PaperRecord>>();
                } catch (const json::exception& e) {
                    fail(ErrorCode::InvalidArgument, std::string("bad records: ") + e.what());
                }
                next = std::make_shared<corpus::CorpusIndex>(*engine->corpus());
                report = next->ingest(records, *embedder);
            } else {
                fail(ErrorCode::InvalidArgument, "body must carry 'path' or 'records'");
            }
            engine->set_corpus(next);
            reply(res, 200, {{"report", report}, {"size", next->size()}});
        });
    });
}

ApiServer::ApiServer(std::shared_ptr<workflow::Engine> engine, std::shared_ptr<corpus::EmbeddingProvider> embedder,
                     std::shared_ptr<const agents::AgentRuntime> runtime, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
    impl_->engine = std::move(engine);
    impl_->embedder = std::move(embedder);
    impl_->runtime = std::move(runtime);
    impl_->options = std::move(options);
    // SO_REUSEPORT (the library default) would let a second server share the port.
    impl_->http.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    impl_->routes();
}

ApiServer::~ApiServer() {
    stop();
    drain();
}

int ApiServer::start() {
    auto& im = *impl_;
    if (im.options.port == 0) {
        im.bound_port = im.http.bind_to_any_port(im.options.host);
        if (im.bound_port <= 0) fail(ErrorCode::PortInUse, "cannot bind " + im.options.host);
    } else {
        if (!im.http.bind_to_port(im.options.host, im.options.port))
            fail(ErrorCode::PortInUse,
                 "cannot bind " + im.options.host + ":" + std::to_string(im.options.port) + " (port in use?)");
        im.bound_port = im.options.port;
    }
    im.listener = std::thread([&im] { im.http.listen_after_bind(); });
    im.http.wait_until_ready();  // a stop() issued earlier would be lost
    return im.bound_port;
}

void ApiServer::stop() {
    auto& im = *impl_;
    im.http.stop();
    if (im.listener.joinable()) im.listener.join();
    {
        std::lock_guard lock(im.stop_mutex);
        im.stopped = true;
    }
    im.stop_cv.notify_all();
}

void ApiServer::wait() {
    auto& im = *impl_;
    std::unique_lock lock(im.stop_mutex);
    im.stop_cv.wait(lock, [&] { return im.stopped; });
}

int ApiServer::port() const noexcept { return impl_->bound_port; }

void ApiServer::drain() {
    auto& im = *impl_;
    std::unique_lock lock(im.mutex);
    im.jobs_cv.wait(lock, [&] { return im.running == 0; });
}

}  // namespace ideation::service
