#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ideation/agents/prompt_template.hpp"
#include "ideation/agents/runtime.hpp"
#include "ideation/corpus/corpus_index.hpp"
#include "ideation/docproc/user_corpus.hpp"
#include "ideation/session/store.hpp"
#include "ideation/workflow/gates.hpp"
#include "ideation/workflow/state.hpp"

namespace ideation::workflow {

struct EngineConfig {
    std::size_t k_papers = 50;
    std::size_t k_per_problem = 10;
    std::size_t k_small = 5;
    int loop_cap = 5;
    std::size_t n_methods = 3;
    std::size_t max_fanout = 4;  // concurrent agent calls per fan-out step
    std::size_t max_tokens = 512;
    std::string tokenizer = "whitespace";
    int call_budget = 3;
};

void to_json(nlohmann::json& j, const EngineConfig& c);
/// Missing keys keep their defaults; bad values throw Config.
void from_json(const nlohmann::json& j, EngineConfig& c);

/// Full text for a corpus paper. The default reads `full_text_uri`
/// (relative to the corpus file's directory) as plain text or PDF.
using DocumentLoader =
    std::function<docproc::DocumentText(const corpus::PaperRecord&, const std::filesystem::path& base_dir)>;

docproc::DocumentText load_document(const corpus::PaperRecord& paper, const std::filesystem::path& base_dir);

/// Paragraphs built from title and abstract.
docproc::DocumentText abstract_document(const corpus::PaperRecord& paper);

struct EngineDeps {
    std::shared_ptr<const corpus::CorpusIndex> corpus;
    std::shared_ptr<corpus::EmbeddingProvider> embedder;
    std::shared_ptr<const agents::AgentRuntime> runtime;
    std::shared_ptr<session::SessionStore> store;
    DocumentLoader loader = load_document;
};

/// A session being driven by an Engine. Operations on one session are
/// serialized; `state()` and `envelope()` can be read while a step runs.
class LiveSession {
public:
    const std::string& id() const noexcept { return id_; }
    SessionState state() const;
    /// Envelope of the pending gate, or null when none is open.
    nlohmann::json envelope() const;
    const EngineConfig& config() const noexcept { return config_; }
    bool busy() const;
    const docproc::UserCorpus& user_corpus() const { return *user_corpus_; }
    const session::SessionLog& log() const { return *log_; }

private:
    friend class Engine;
    LiveSession(std::string id, EngineConfig config, std::shared_ptr<session::SessionLog> log,
                std::shared_ptr<const corpus::CorpusIndex> corpus);

    std::string id_;
    EngineConfig config_;
    std::shared_ptr<session::SessionLog> log_;
    std::shared_ptr<const corpus::CorpusIndex> corpus_;
    std::unique_ptr<docproc::UserCorpus> user_corpus_;
    mutable std::mutex run_mutex_;
    mutable std::mutex state_mutex_;
    SessionState state_;
};

/// Drives the two workflows. Every state change is first validated against
/// the reducer, then appended to the session log, then applied.
///
/// Agent steps run until the next gate or terminal state. If a required
/// agent call fails the error is logged, the exception propagates and the
/// session stays where it was; `advance` retries from there.
class Engine {
public:
    Engine(EngineDeps deps, EngineConfig defaults = {});

    std::shared_ptr<LiveSession> create_session(const std::string& creator,
                                                std::optional<std::string> session_id = std::nullopt,
                                                std::optional<EngineConfig> config = std::nullopt);

    /// Replays a stored log (throws CorruptLog on a bad prefix) and rebuilds
    /// the session's user corpus.
    std::shared_ptr<LiveSession> resume_session(const std::string& session_id);

    void start_motivation_validation(LiveSession& s, const std::string& title, const std::string& abstract);
    void start_method_synthesis(LiveSession& s);
    /// Validates the submission against the pending gate and logs it. Throws
    /// StaleGate, InvalidArgument or PreconditionFailed with nothing logged.
    void resolve_gate(LiveSession& s, const GateSubmission& submission);
    /// resolve_gate, then the agent steps up to the next gate.
    void submit(LiveSession& s, const GateSubmission& submission);
    void advance(LiveSession& s);

    /// Sessions created afterwards use `corpus`; running sessions keep theirs.
    void set_corpus(std::shared_ptr<const corpus::CorpusIndex> corpus);
    std::shared_ptr<const corpus::CorpusIndex> corpus() const;

    const EngineConfig& defaults() const noexcept { return defaults_; }
    session::SessionStore& store() const { return *deps_.store; }

private:
    struct CallSpec;
    struct CallResult;

    void run(LiveSession& s);
    void resolve_locked(LiveSession& s, const GateSubmission& submission);
    void emit(LiveSession& s, session::Actor actor, session::EventKind kind, nlohmann::json payload);
    void transition(LiveSession& s, StateTag to, nlohmann::json set = nlohmann::json::object(),
                    session::Actor actor = session::Actor::System);
    void open_gate(LiveSession& s, StateTag gate, nlohmann::json set = nlohmann::json::object());

    CallResult execute(const LiveSession& s, const CallSpec& spec) const;
    void record(LiveSession& s, const CallSpec& spec, const CallResult& result);
    std::string call_required(LiveSession& s, const CallSpec& spec);
    template <typename F>
    void fan_out(const LiveSession& s, std::size_t n, F&& f) const;

    docproc::UserCorpus& user_corpus(LiveSession& s) { return *s.user_corpus_; }
    void index_paper(LiveSession& s, const std::string& paper_id, std::vector<std::string>& flags);
    nlohmann::json retrieval_set(LiveSession& s, const Proposal& proposal);

    void annotate_relevance(LiveSession& s);
    void chunk_accepted(LiveSession& s);
    void extract_motivation(LiveSession& s);
    void generate_questions(LiveSession& s);
    void validate(LiveSession& s);
    void extract_gaps(LiveSession& s);
    void rewrite_proposal(LiveSession& s);
    void after_proposal_gate(LiveSession& s);
    void generate_related(LiveSession& s);
    void gather_evidence(LiveSession& s);
    void synthesize(LiveSession& s);
    void rewrite_with_methods(LiveSession& s);
    void finish(LiveSession& s);

    EngineDeps deps_;
    EngineConfig defaults_;
    mutable std::mutex corpus_mutex_;
};

}  // namespace ideation::workflow
