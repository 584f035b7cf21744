#pragma once

#include <memory>
#include <string>

#include "ideation/agents/runtime.hpp"
#include "ideation/corpus/embedding.hpp"
#include "ideation/workflow/engine.hpp"

namespace ideation::service {

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;    // 0 picks a free port
    std::string token;  // bearer token; empty disables authentication
};

/// JSON-over-HTTP front end for the engine.
///
///   GET  /health
///   GET  /sessions                       POST /sessions
///   POST /sessions/{id}/proposal         POST /sessions/{id}/method-synthesis
///   GET  /sessions/{id}/gate             POST /sessions/{id}/gate
///   POST /sessions/{id}/resume
///   GET  /sessions/{id}/state            GET  /sessions/{id}/artifacts
///   GET  /sessions/{id}/log              GET  /sessions/{id}/export?task=
///   GET  /jobs/{id}                      POST /admin/ingest
///
/// Agent work runs as background jobs; the POSTs that start it answer 202
/// with a job id. A session accepts one job at a time (409 otherwise).
class ApiServer {
public:
    ApiServer(std::shared_ptr<workflow::Engine> engine, std::shared_ptr<corpus::EmbeddingProvider> embedder,
              std::shared_ptr<const agents::AgentRuntime> runtime, ServerOptions options);
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds and starts serving on a background thread. Returns the bound
    /// port. Throws PortInUse when the address cannot be bound.
    int start();
    void stop();
    /// Blocks until stop() is called from another thread or a signal handler.
    void wait();
    int port() const noexcept;

    /// Waits for every background job to finish.
    void drain();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ideation::service
