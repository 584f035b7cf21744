#include "ideation/workflow/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "ideation/agents/parsers.hpp"
#include "ideation/docproc/tokenizer.hpp"
#include "ideation/error.hpp"
#include "ideation/text.hpp"

namespace ideation::workflow {

using nlohmann::json;
using session::Actor;
using session::EventKind;
using agents::TemplateId;
using agents::Verdict;

void to_json(json& j, const EngineConfig& c) {
    j = {{"k_papers", c.k_papers},       {"k_per_problem", c.k_per_problem},
         {"k_small", c.k_small},         {"loop_cap", c.loop_cap},
         {"n_methods", c.n_methods},     {"max_fanout", c.max_fanout},
         {"max_tokens", c.max_tokens},   {"tokenizer", c.tokenizer},
         {"call_budget", c.call_budget}};
}

void from_json(const json& j, EngineConfig& c) {
    if (!j.is_object()) fail(ErrorCode::Config, "engine config must be an object");
    auto positive = [&](const char* key, std::size_t& out) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number_integer() || v.get<long long>() <= 0)
            fail(ErrorCode::Config, std::string(key) + ": expected a positive integer");
        out = v.get<std::size_t>();
    };
    positive("k_papers", c.k_papers);
    positive("k_per_problem", c.k_per_problem);
    positive("k_small", c.k_small);
    positive("n_methods", c.n_methods);
    positive("max_fanout", c.max_fanout);
    positive("max_tokens", c.max_tokens);
    if (j.contains("loop_cap")) {
        const auto& lc = j.at("loop_cap");
        if (!lc.is_number_integer() || lc.get<long long>() < 0)
            fail(ErrorCode::Config, "loop_cap: expected a non-negative integer");
        c.loop_cap = lc.get<int>();
    }
    if (j.contains("call_budget")) {
        std::size_t budget = 0;
        positive("call_budget", budget);
        c.call_budget = static_cast<int>(budget);
    }
    if (j.contains("tokenizer")) {
        if (!j.at("tokenizer").is_string()) fail(ErrorCode::Config, "tokenizer: expected a string");
        c.tokenizer = j.at("tokenizer").get<std::string>();
        docproc::make_tokenizer(c.tokenizer);
    }
}

docproc::DocumentText abstract_document(const corpus::PaperRecord& paper) {
    docproc::DocumentText doc{paper.paper_id, {}};
    if (!text::trim(paper.title).empty()) doc.paragraphs.emplace_back(text::trim(paper.title));
    auto abs = docproc::segment_paragraphs(paper.abstract, paper.paper_id);
    for (auto& p : abs.paragraphs) doc.paragraphs.push_back(std::move(p));
    return doc;
}

docproc::DocumentText load_document(const corpus::PaperRecord& paper, const std::filesystem::path& base_dir) {
    if (!paper.full_text_uri || paper.full_text_uri->empty()) return abstract_document(paper);
    std::string uri = *paper.full_text_uri;
    if (uri.starts_with("file://")) uri = uri.substr(7);
    std::filesystem::path path(uri);
    if (path.is_relative()) path = base_dir / path;
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot read full text of " + paper.paper_id + ": " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto doc = docproc::segment_paragraphs(buf.str(), paper.paper_id);
    if (doc.paragraphs.empty()) fail(ErrorCode::ParseError, "full text of " + paper.paper_id + " is empty");
    return doc;
}

LiveSession::LiveSession(std::string id, EngineConfig config, std::shared_ptr<session::SessionLog> log,
                         std::shared_ptr<const corpus::CorpusIndex> corpus)
    : id_(std::move(id)), config_(std::move(config)), log_(std::move(log)), corpus_(std::move(corpus)) {
    docproc::ChunkingOptions opts;
    opts.max_tokens = config_.max_tokens;
    opts.tokenizer = docproc::make_tokenizer(config_.tokenizer);
    user_corpus_ = std::make_unique<docproc::UserCorpus>(id_, std::move(opts));
}

SessionState LiveSession::state() const {
    std::lock_guard lock(state_mutex_);
    return state_;
}

json LiveSession::envelope() const {
    std::lock_guard lock(state_mutex_);
    if (!state_.pending) return nullptr;
    return gate_envelope(state_);
}

bool LiveSession::busy() const {
    std::unique_lock lock(run_mutex_, std::try_to_lock);
    return !lock.owns_lock();
}

struct Engine::CallSpec {
    TemplateId id = TemplateId::P1;
    agents::Bindings bindings;
    std::vector<std::string> consumes;
    json context = json::object();
};

struct Engine::CallResult {
    std::vector<agents::Message> messages;
    std::optional<agents::CompletionResult> completion;
    ErrorCode code = ErrorCode::ProviderRejected;
    std::string error;

    bool ok() const noexcept { return completion.has_value(); }
    std::string failure() const { return std::string(to_string(code)) + ": " + error; }
};

namespace {

constexpr std::string_view kLimitationQuery = "limitations or gaps of this research paper";

std::string proposal_ref(const Proposal& p) { return "proposal:v" + std::to_string(p.version); }

std::string bullet_text(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& it : items) {
        if (!out.empty()) out += '\n';
        out += "- " + it;
    }
    return out;
}

std::string paper_text(const corpus::PaperRecord& r) { return "Title: " + r.title + "\nAbstract: " + r.abstract; }

std::string chunk_context(const std::vector<docproc::Chunk>& chunks) {
    std::string out;
    for (const auto& c : chunks) {
        if (!out.empty()) out += "\n\n";
        out += "Paragraph " + c.chunk_id + ": " + c.text;
    }
    return out;
}

std::vector<docproc::Chunk> plain(const std::vector<docproc::ScoredChunk>& scored) {
    std::vector<docproc::Chunk> out;
    out.reserve(scored.size());
    for (const auto& s : scored) out.push_back(s.chunk);
    return out;
}

std::vector<std::string> ids_of(const std::vector<docproc::Chunk>& chunks) {
    std::vector<std::string> out;
    for (const auto& c : chunks) out.push_back(c.chunk_id);
    return out;
}

Actor actor_for(agents::Persona p) { return p == agents::Persona::Mentor ? Actor::Mentor : Actor::Colleague; }

std::string first_line_item(std::string_view raw) {
    auto bullets = agents::parse_bullets(raw);
    std::string t;
    if (!bullets.items.empty()) {
        t = bullets.items.front();
    } else {
        for (auto& line : text::split_lines(raw)) {
            auto tl = text::trim(line);
            if (!tl.empty()) {
                t = std::string(tl);
                break;
            }
        }
    }
    auto tt = text::trim(t);
    while (!tt.empty() && (tt.front() == '"' || tt.front() == '\'')) tt.remove_prefix(1);
    while (!tt.empty() && (tt.back() == '"' || tt.back() == '\'')) tt.remove_suffix(1);
    return std::string(text::trim(tt));
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Case-insensitive whole-word occurrence.
bool mentions(std::string_view haystack, std::string_view needle) {
    if (needle.size() < 3) return false;
    auto h = text::to_lower(haystack);
    auto n = text::to_lower(needle);
    for (std::size_t pos = h.find(n); pos != std::string::npos; pos = h.find(n, pos + 1)) {
        bool left = pos == 0 || !word_char(h[pos - 1]);
        std::size_t end = pos + n.size();
        bool right = end >= h.size() || !word_char(h[end]);
        if (left && right) return true;
    }
    return false;
}

bool cites(std::string_view method, const std::string& title) {
    if (title.empty()) return false;
    if (mentions(method, title)) return true;
    auto colon = title.find(':');
    return colon != std::string::npos && mentions(method, text::trim(std::string_view(title).substr(0, colon)));
}

template <typename T>
std::vector<T> with(std::vector<T> v, T extra) {
    v.push_back(std::move(extra));
    return v;
}

}  // namespace

Engine::Engine(EngineDeps deps, EngineConfig defaults) : deps_(std::move(deps)), defaults_(std::move(defaults)) {
    if (!deps_.corpus || !deps_.embedder || !deps_.runtime || !deps_.store)
        fail(ErrorCode::InvalidArgument, "engine needs a corpus, an embedder, an agent runtime and a store");
    if (!deps_.loader) deps_.loader = load_document;
}

void Engine::set_corpus(std::shared_ptr<const corpus::CorpusIndex> corpus) {
    if (!corpus) fail(ErrorCode::InvalidArgument, "corpus is null");
    std::lock_guard lock(corpus_mutex_);
    deps_.corpus = std::move(corpus);
}

std::shared_ptr<const corpus::CorpusIndex> Engine::corpus() const {
    std::lock_guard lock(corpus_mutex_);
    return deps_.corpus;
}

std::shared_ptr<LiveSession> Engine::create_session(const std::string& creator,
                                                    std::optional<std::string> session_id,
                                                    std::optional<EngineConfig> config) {
    EngineConfig cfg = config.value_or(defaults_);
    json cfg_json = cfg;
    cfg_json.get_to(cfg);  // validates
    auto log = deps_.store->create(creator, cfg_json, std::move(session_id));
    std::shared_ptr<LiveSession> s(new LiveSession(log->session_id(), cfg, log, corpus()));
    std::lock_guard lock(s->run_mutex_);
    emit(*s, Actor::Researcher, EventKind::StateTransition,
         {{"from", nullptr},
          {"to", to_string(StateTag::MvStart)},
          {"set", {{"session_id", s->id_}, {"creator", creator}, {"config", cfg_json}}}});
    return s;
}

std::shared_ptr<LiveSession> Engine::resume_session(const std::string& session_id) {
    auto log = deps_.store->open(session_id);
    SessionState st;
    for (const auto& e : log->events()) {
        try {
            apply_event(st, e);
        } catch (const Error& err) {
            fail(ErrorCode::CorruptLog, "session " + session_id + " event " + std::to_string(e.event_id) +
                                            ": " + err.what());
        }
    }
    EngineConfig cfg = defaults_;
    if (st.config.is_object()) st.config.get_to(cfg);
    std::shared_ptr<LiveSession> s(new LiveSession(session_id, cfg, log, corpus()));
    {
        std::lock_guard lock(s->state_mutex_);
        s->state_ = st;
    }
    std::vector<std::string> ignored;
    for (const auto& pid : st.indexed_papers)
        if (s->corpus_->contains(pid)) index_paper(*s, pid, ignored);
    return s;
}

void Engine::emit(LiveSession& s, Actor actor, EventKind kind, json payload) {
    const bool structural =
        kind == EventKind::StateTransition || kind == EventKind::GateOpen || kind == EventKind::GateEdit;
    std::optional<SessionState> snapshot;
    {
        std::lock_guard lock(s.state_mutex_);
        session::LogEvent probe{s.state_.last_event_id + 1, {}, actor, kind, payload};
        std::optional<SessionState> next;
        if (structural) {
            next = s.state_;
            apply_event(*next, probe);
        }
        auto ev = s.log_->append(actor, kind, std::move(payload));
        if (ev.event_id != probe.event_id)
            fail(ErrorCode::CorruptLog, "log and state disagree on event ids for session " + s.id_);
        if (structural) {
            s.state_ = std::move(*next);
            if (kind != EventKind::GateEdit) snapshot = s.state_;
        } else {
            apply_event(s.state_, ev);
        }
    }
    if (snapshot) deps_.store->update_record(s.id_, std::string(to_string(snapshot->tag)), json(*snapshot));
}

void Engine::transition(LiveSession& s, StateTag to, json set, Actor actor) {
    emit(s, actor, EventKind::StateTransition,
         {{"from", to_string(s.state_.tag)}, {"to", to_string(to)}, {"set", std::move(set)}});
}

void Engine::open_gate(LiveSession& s, StateTag gate, json set) {
    json payload = {{"gate_id", next_gate_id(s.state_, gate)},
                    {"kind", to_string(gate)},
                    {"from", to_string(s.state_.tag)},
                    {"set", std::move(set)}};
    SessionState preview = s.state_;
    session::LogEvent probe{preview.last_event_id + 1, {}, Actor::System, EventKind::GateOpen, payload};
    apply_event(preview, probe);
    payload["envelope"] = gate_envelope(preview);
    emit(s, Actor::System, EventKind::GateOpen, std::move(payload));
}

Engine::CallResult Engine::execute(const LiveSession& s, const CallSpec& spec) const {
    CallResult r;
    r.messages = agents::render_prompt(spec.id, spec.bindings);
    try {
        r.completion = deps_.runtime->complete(agents::persona_for(spec.id), agents::to_string(spec.id),
                                               r.messages, s.config_.call_budget);
    } catch (const Error& e) {
        r.code = e.code();
        r.error = e.what();
    } catch (const std::exception& e) {
        r.code = ErrorCode::ProviderRejected;
        r.error = e.what();
    }
    return r;
}

void Engine::record(LiveSession& s, const CallSpec& spec, const CallResult& r) {
    const auto persona = agents::persona_for(spec.id);
    const auto& pc = deps_.runtime->persona(persona);
    const std::string call_id = "c" + std::to_string(s.state_.llm_calls + 1);
    json messages = r.messages;
    emit(s, actor_for(persona), EventKind::LlmCall,
         {{"call_id", call_id},
          {"template_id", agents::to_string(spec.id)},
          {"persona", agents::to_string(persona)},
          {"provider", pc.provider_id},
          {"model", pc.model_name},
          {"messages", std::move(messages)},
          {"consumes", spec.consumes},
          {"context", spec.context}});
    if (r.ok()) {
        emit(s, actor_for(persona), EventKind::LlmResponse,
             {{"call_id", call_id},
              {"text", r.completion->text},
              {"attempts", r.completion->attempts},
              {"latency_ms", r.completion->latency.count()},
              {"usage",
               {{"prompt_tokens", r.completion->usage.prompt_tokens},
                {"completion_tokens", r.completion->usage.completion_tokens}}}});
    } else {
        emit(s, Actor::System, EventKind::Error,
             {{"call_id", call_id},
              {"template_id", agents::to_string(spec.id)},
              {"code", to_string(r.code)},
              {"message", r.error}});
    }
}

std::string Engine::call_required(LiveSession& s, const CallSpec& spec) {
    auto r = execute(s, spec);
    record(s, spec, r);
    if (!r.ok()) fail(r.code, r.error);
    return r.completion->text;
}

template <typename F>
void Engine::fan_out(const LiveSession& s, std::size_t n, F&& f) const {
    const std::size_t workers = std::min(n, std::max<std::size_t>(1, s.config_.max_fanout));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                    try {
                        f(i);
                    } catch (...) {
                        std::lock_guard lock(err_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

void Engine::index_paper(LiveSession& s, const std::string& paper_id, std::vector<std::string>& flags) {
    auto& uc = user_corpus(s);
    if (uc.is_indexed(paper_id)) return;
    auto record = s.corpus_->lookup(paper_id);
    docproc::DocumentText doc;
    try {
        doc = deps_.loader(record, s.corpus_->base_dir());
        if (doc.paragraphs.empty()) fail(ErrorCode::ParseError, "no paragraphs");
    } catch (const Error&) {
        if (record.full_text_uri) flags.push_back("full-text-unavailable:" + paper_id);
        doc = abstract_document(record);
    }
    uc.accept_paper(paper_id);
    uc.index_chunks(doc, *deps_.embedder);
}

json Engine::retrieval_set(LiveSession& s, const Proposal& proposal) {
    const auto& st = s.state_;
    std::vector<corpus::RetrievalHit> hits;
    if (s.corpus_->size() > 0)
        hits = s.corpus_->retrieve_topk(corpus::query_text(proposal.title, proposal.abstract),
                                        s.config_.k_papers, *deps_.embedder);
    std::set<std::string> seen(st.seen_papers.begin(), st.seen_papers.end());
    std::vector<CandidatePaper> papers;
    for (const auto& h : hits) {
        CandidatePaper c;
        c.paper_id = h.paper_id;
        c.title = s.corpus_->lookup(h.paper_id).title;
        c.score = h.score;
        c.rank = h.rank;
        c.previously_seen = seen.contains(h.paper_id);
        papers.push_back(std::move(c));
    }
    for (const auto& p : papers) seen.insert(p.paper_id);
    std::vector<std::string> flags;
    if (papers.empty()) flags.push_back("add-papers-required");
    return {{"papers", papers},
            {"seen_papers", std::vector<std::string>(seen.begin(), seen.end())},
            {"motivation", json::array()},
            {"questions", json::array()},
            {"verdicts", json::array()},
            {"gap_papers", json::array()},
            {"gaps", json::array()},
            {"candidate", nullptr},
            {"flags", flags}};
}

void Engine::start_motivation_validation(LiveSession& s, const std::string& title, const std::string& abstract) {
    std::lock_guard lock(s.run_mutex_);
    if (s.state_.tag != StateTag::MvStart || s.state_.proposal)
        fail(ErrorCode::PreconditionFailed, "session " + s.id_ + " already has a proposal");
    Proposal p{std::string(text::trim(title)), std::string(text::trim(abstract)), 1, Provenance::Original};
    if (p.title.empty() || p.abstract.empty())
        fail(ErrorCode::PreconditionFailed, "proposal title and abstract must be non-empty");
    json set;
    try {
        set = retrieval_set(s, p);
    } catch (const Error& e) {
        emit(s, Actor::System, EventKind::Error,
             {{"step", to_string(s.state_.tag)}, {"code", to_string(e.code())}, {"message", e.what()}});
        throw;
    }
    set["proposal"] = p;
    set["history"] = json::array({p});
    set["pass"] = 1;
    set["loop_count"] = 0;
    transition(s, StateTag::MvRetrieved, std::move(set), Actor::Researcher);
    run(s);
}

void Engine::start_method_synthesis(LiveSession& s) {
    std::lock_guard lock(s.run_mutex_);
    const auto& st = s.state_;
    const bool allowed = st.tag == StateTag::MvValidated || (st.tag == StateTag::Done && !st.ms_started);
    if (!allowed || st.pending || !st.proposal)
        fail(ErrorCode::PreconditionFailed, "method synthesis needs a validated or accepted proposal (session is in " +
                                                std::string(to_string(st.tag)) + ")");
    try {
        auto text = call_required(s, {TemplateId::P6,
                                      {{"proposal", format_proposal(*st.proposal)}},
                                      {proposal_ref(*st.proposal)}});
        auto statement = std::string(text::trim(text));
        auto flags = st.flags;
        if (statement.empty()) flags.push_back("problem-statement-empty");
        transition(s, StateTag::MsProblemExtracted,
                   {{"ms_started", true},
                    {"problem_statement", statement},
                    {"problem_statement_agent", statement},
                    {"flags", flags}});
    } catch (const Error& e) {
        emit(s, Actor::System, EventKind::Error,
             {{"step", to_string(s.state_.tag)}, {"code", to_string(e.code())}, {"message", e.what()}});
        throw;
    }
    run(s);
}

void Engine::submit(LiveSession& s, const GateSubmission& sub) {
    std::lock_guard lock(s.run_mutex_);
    resolve_locked(s, sub);
    run(s);
}

void Engine::resolve_gate(LiveSession& s, const GateSubmission& sub) {
    std::lock_guard lock(s.run_mutex_);
    resolve_locked(s, sub);
}

void Engine::resolve_locked(LiveSession& s, const GateSubmission& sub) {
    if (!s.state_.pending) fail(ErrorCode::StaleGate, "session " + s.id_ + " has no open gate");
    const StateTag kind = s.state_.pending->kind;
    if (sub.gate_id != s.state_.pending->gate_id)
        fail(ErrorCode::StaleGate, "gate '" + sub.gate_id + "' is not the pending gate (" +
                                       s.state_.pending->gate_id + ")");
    json payload = edit_payload(sub, kind);
    if (!payload["edits"].is_array()) fail(ErrorCode::InvalidArgument, "'edits' must be an array");
    if (kind == StateTag::GateAPapers) {
        for (auto& edit : payload["edits"]) {
            if (!edit.is_object() || edit.value("op", "") != "add") continue;
            if (!edit.contains("paper_id") || !edit["paper_id"].is_string())
                fail(ErrorCode::InvalidArgument, "add needs a 'paper_id'");
            auto pid = edit["paper_id"].get<std::string>();
            if (!s.corpus_->contains(pid))
                fail(ErrorCode::InvalidArgument, "paper '" + pid + "' is not in the corpus");
            edit["title"] = s.corpus_->lookup(pid).title;
        }
    }
    emit(s, Actor::Researcher, EventKind::GateEdit, std::move(payload));
}

void Engine::advance(LiveSession& s) {
    std::lock_guard lock(s.run_mutex_);
    run(s);
}

void Engine::run(LiveSession& s) {
    try {
        for (;;) {
            const auto& st = s.state_;
            if (st.pending) return;
            switch (st.tag) {
                case StateTag::MvStart:
                case StateTag::MvValidated:
                case StateTag::Done:
                    return;
                case StateTag::MvRetrieved: annotate_relevance(s); break;
                case StateTag::GateAPapers: chunk_accepted(s); break;
                case StateTag::MvChunked: extract_motivation(s); break;
                case StateTag::MvMotivationExtracted: generate_questions(s); break;
                case StateTag::GateBQuestions: validate(s); break;
                case StateTag::GateCVerdicts: extract_gaps(s); break;
                case StateTag::MvGapsExtracted: open_gate(s, StateTag::GateDGaps); break;
                case StateTag::GateDGaps: rewrite_proposal(s); break;
                case StateTag::MvRewritten: open_gate(s, StateTag::GateEProposal); break;
                case StateTag::GateEProposal: after_proposal_gate(s); break;
                case StateTag::MsProblemExtracted: generate_related(s); break;
                case StateTag::MsRelatedGenerated: open_gate(s, StateTag::GateFProblems); break;
                case StateTag::GateFProblems: gather_evidence(s); break;
                case StateTag::MsEvidenceGathered: open_gate(s, StateTag::GateGEvidence); break;
                case StateTag::GateGEvidence: synthesize(s); break;
                case StateTag::MsSynthesized: open_gate(s, StateTag::GateHMethods); break;
                case StateTag::GateHMethods: rewrite_with_methods(s); break;
                case StateTag::MsRewritten: open_gate(s, StateTag::GateIFinal); break;
                case StateTag::GateIFinal: finish(s); break;
            }
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SessionClosed)
            emit(s, Actor::System, EventKind::Error,
                 {{"step", to_string(s.state_.tag)}, {"code", to_string(e.code())}, {"message", e.what()}});
        throw;
    }
}

void Engine::annotate_relevance(LiveSession& s) {
    const auto& st = s.state_;
    auto papers = st.papers;
    auto cache = st.relevance_cache;
    auto flags = st.flags;
    const auto& prop = *st.proposal;
    const auto version = std::to_string(prop.version);

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < papers.size(); ++i) {
        auto it = cache.find(papers[i].paper_id + "@" + version);
        if (it != cache.end())
            papers[i].relevance = it->second;
        else
            todo.push_back(i);
    }
    std::vector<CallSpec> specs(todo.size());
    for (std::size_t k = 0; k < todo.size(); ++k) {
        const auto& pid = papers[todo[k]].paper_id;
        specs[k] = {TemplateId::Relevance,
                    {{"proposal", format_proposal(prop)}, {"paper", paper_text(s.corpus_->lookup(pid))}},
                    {proposal_ref(prop)},
                    {{"paper_id", pid}}};
    }
    std::vector<CallResult> results(todo.size());
    fan_out(s, todo.size(), [&](std::size_t k) { results[k] = execute(s, specs[k]); });
    for (std::size_t k = 0; k < todo.size(); ++k) {
        record(s, specs[k], results[k]);
        auto& paper = papers[todo[k]];
        if (results[k].ok()) {
            paper.relevance = text::collapse_whitespace(results[k].completion->text);
            cache[paper.paper_id + "@" + version] = paper.relevance;
        } else {
            flags.push_back("relevance-unavailable:" + paper.paper_id);
        }
    }
    open_gate(s, StateTag::GateAPapers, {{"papers", papers}, {"relevance_cache", cache}, {"flags", flags}});
}

void Engine::chunk_accepted(LiveSession& s) {
    const auto& st = s.state_;
    auto papers = st.papers;
    auto flags = st.flags;
    std::set<std::string> indexed(st.indexed_papers.begin(), st.indexed_papers.end());
    for (auto& p : papers) {
        if (!active(p.status)) continue;
        index_paper(s, p.paper_id, flags);
        p.chunk_count = user_corpus(s).chunks_of(p.paper_id).size();
        indexed.insert(p.paper_id);
    }
    if (const auto& dir = deps_.store->dir()) {
        std::ofstream dump(*dir / (s.id_ + ".chunks.jsonl"), std::ios::trunc);
        user_corpus(s).write_dump(dump);
    }
    transition(s, StateTag::MvChunked,
               {{"papers", papers},
                {"indexed_papers", std::vector<std::string>(indexed.begin(), indexed.end())},
                {"flags", flags}});
}

void Engine::extract_motivation(LiveSession& s) {
    const auto& prop = *s.state_.proposal;
    auto text = call_required(s, {TemplateId::P1, {{"proposal", format_proposal(prop)}}, {proposal_ref(prop)}});
    auto bullets = agents::parse_bullets(text);
    auto flags = s.state_.flags;
    if (bullets.needs_author()) flags.push_back("motivation-empty");
    transition(s, StateTag::MvMotivationExtracted, {{"motivation", bullets.items}, {"flags", flags}});
}

void Engine::generate_questions(LiveSession& s) {
    const auto& st = s.state_;
    const auto& prop = *st.proposal;
    auto flags = st.flags;
    auto next = st.next_question;
    std::vector<ValidationQuestion> questions;
    if (!st.motivation.empty()) {
        auto text = call_required(s, {TemplateId::P2,
                                      {{"proposal", format_proposal(prop)}, {"motivation", bullet_text(st.motivation)}},
                                      {proposal_ref(prop)}});
        auto items = agents::parse_bullets(text).items;
        for (std::size_t i = 0; i < items.size(); ++i) {
            ValidationQuestion q;
            q.question_id = "q" + std::to_string(next++);
            q.agent_text = items[i];
            q.text = with_question_prefix(items[i], "relevant to:");
            q.auto_prefixed = q.text != text::trim(items[i]);
            if (i < st.motivation.size()) q.source_motivation_bullet = st.motivation[i];
            if (q.auto_prefixed) flags.push_back("auto-prefixed:" + q.question_id);
            questions.push_back(std::move(q));
        }
    }
    if (questions.empty()) flags.push_back("questions-need-author");
    open_gate(s, StateTag::GateBQuestions, {{"questions", questions}, {"next_question", next}, {"flags", flags}});
}

void Engine::validate(LiveSession& s) {
    const auto& st = s.state_;
    std::vector<const ValidationQuestion*> questions;
    for (const auto& q : st.questions)
        if (active(q.status)) questions.push_back(&q);
    std::vector<std::string> papers;
    for (const auto& p : st.papers)
        if (active(p.status)) papers.push_back(p.paper_id);
    std::sort(papers.begin(), papers.end());

    struct Pair {
        const ValidationQuestion* q;
        std::string paper_id;
        std::vector<docproc::Chunk> chunks;
        std::optional<Error> retrieval_error;
        CallSpec spec;
        CallResult result;
    };
    std::vector<Pair> pairs;
    for (const auto* q : questions)
        for (const auto& pid : papers) pairs.push_back({q, pid, {}, std::nullopt, {}, {}});

    const auto& uc = user_corpus(s);
    fan_out(s, pairs.size(), [&](std::size_t i) {
        auto& pr = pairs[i];
        try {
            pr.chunks = plain(uc.retrieve_chunks(pr.paper_id, pr.q->text, s.config_.k_small, *deps_.embedder));
        } catch (const Error& e) {
            pr.retrieval_error = e;
            return;
        }
        pr.spec = {TemplateId::P3,
                   {{"question", pr.q->text}, {"paper_chunks", chunk_context(pr.chunks)}},
                   {"question:" + pr.q->question_id},
                   {{"question_id", pr.q->question_id}, {"paper_id", pr.paper_id}, {"chunk_ids", ids_of(pr.chunks)}}};
        pr.result = execute(s, pr.spec);
    });

    std::vector<ValidationVerdict> verdicts;
    std::size_t yes = 0;
    for (auto& pr : pairs) {
        ValidationVerdict v;
        v.question_id = pr.q->question_id;
        v.paper_id = pr.paper_id;
        v.answer = agents::BinaryAnswer{Verdict::Unanswerable, std::nullopt, false, false};
        if (pr.retrieval_error) {
            v.error = std::string(to_string(pr.retrieval_error->code())) + ": " + pr.retrieval_error->what();
            emit(s, Actor::System, EventKind::Error,
                 {{"step", "validate"},
                  {"question_id", v.question_id},
                  {"paper_id", v.paper_id},
                  {"code", to_string(pr.retrieval_error->code())},
                  {"message", pr.retrieval_error->what()}});
        } else {
            record(s, pr.spec, pr.result);
            if (pr.result.ok()) {
                v.answer = agents::parse_binary_answer(pr.result.completion->text);
                if (v.answer.verdict == Verdict::Yes) v.supporting_chunk_ids = ids_of(pr.chunks);
            } else {
                v.error = pr.result.failure();
            }
        }
        if (v.answer.verdict == Verdict::Yes) ++yes;
        verdicts.push_back(std::move(v));
    }
    if (yes == 0) {
        transition(s, StateTag::MvValidated,
                   {{"verdicts", verdicts},
                    {"outcome", "validated"},
                    {"notices", with(st.notices, std::string("Motivation validated: no retrieved paper "
                                                             "already addresses it."))}});
    } else {
        open_gate(s, StateTag::GateCVerdicts, {{"verdicts", verdicts}});
    }
}

void Engine::extract_gaps(LiveSession& s) {
    const auto& st = s.state_;
    const auto& prop = *st.proposal;
    std::map<std::string, std::vector<const ValidationVerdict*>> by_paper;
    for (const auto& v : st.verdicts)
        if (v.answer.verdict == Verdict::Yes && active(v.status)) by_paper[v.paper_id].push_back(&v);
    if (by_paper.empty()) {
        transition(s, StateTag::MvValidated,
                   {{"outcome", "validated"},
                    {"notices", with(st.notices, std::string("Motivation validated: every supporting verdict "
                                                             "was rejected at review."))}});
        return;
    }
    std::map<std::string, std::string> question_text;
    for (const auto& q : st.questions) question_text[q.question_id] = q.text;

    struct Work {
        std::string paper_id;
        std::vector<docproc::Chunk> chunks;  // supporting chunks first
        CallSpec spec;
        CallResult result;
        std::optional<std::string> retrieval_error;
    };
    std::vector<Work> work;
    const auto& uc = user_corpus(s);
    for (const auto& [pid, verdicts] : by_paper) {
        Work w;
        w.paper_id = pid;
        auto all = uc.chunks_of(pid);
        std::set<std::string> have;
        std::vector<std::string> consumes{proposal_ref(prop)};
        std::string descriptions;
        for (const auto* v : verdicts) {
            for (const auto& cid : v->supporting_chunk_ids) {
                if (!have.insert(cid).second) continue;
                for (const auto& c : all)
                    if (c.chunk_id == cid) w.chunks.push_back(c);
            }
            consumes.push_back("question:" + v->question_id);
            consumes.push_back("verdict:" + v->item_id());
            if (!descriptions.empty()) descriptions += "\n\n";
            descriptions += "Question: " + question_text[v->question_id] +
                            "\nExplanation: " + v->answer.justification.value_or("");
        }
        w.spec = {TemplateId::P4,
                  {{"proposal", format_proposal(prop)}, {"descriptions", descriptions}},
                  std::move(consumes),
                  {{"paper_id", pid}}};
        work.push_back(std::move(w));
    }
    fan_out(s, work.size(), [&](std::size_t i) {
        auto& w = work[i];
        std::set<std::string> have;
        for (const auto& c : w.chunks) have.insert(c.chunk_id);
        try {
            for (auto& c : plain(uc.retrieve_chunks(w.paper_id, kLimitationQuery, s.config_.k_small, *deps_.embedder)))
                if (have.insert(c.chunk_id).second) w.chunks.push_back(std::move(c));
        } catch (const Error& e) {
            w.retrieval_error = std::string(e.what());
        }
        w.spec.bindings["paper_chunks"] = chunk_context(w.chunks);
        w.spec.context["chunk_ids"] = ids_of(w.chunks);
        w.result = execute(s, w.spec);
    });

    auto gaps = std::vector<ResearchGap>{};
    auto flags = st.flags;
    auto next = st.next_gap;
    std::vector<std::string> gap_papers;
    for (auto& w : work) {
        gap_papers.push_back(w.paper_id);
        if (w.retrieval_error) flags.push_back("limitation-chunks-unavailable:" + w.paper_id);
        record(s, w.spec, w.result);
        if (!w.result.ok()) {
            flags.push_back("gap-extraction-failed:" + w.paper_id);
            continue;
        }
        auto items = agents::parse_bullets(w.result.completion->text).items;
        if (items.empty()) flags.push_back("gaps-empty:" + w.paper_id);
        for (auto& item : items) {
            ResearchGap g;
            g.gap_id = "g" + std::to_string(next++);
            g.paper_id = w.paper_id;
            g.text = item;
            g.agent_text = std::move(item);
            gaps.push_back(std::move(g));
        }
    }
    transition(s, StateTag::MvGapsExtracted,
               {{"gap_papers", gap_papers}, {"gaps", gaps}, {"next_gap", next}, {"flags", flags}});
}

void Engine::rewrite_proposal(LiveSession& s) {
    const auto& st = s.state_;
    const auto& prop = *st.proposal;
    std::vector<std::string> texts;
    std::vector<std::string> consumes{proposal_ref(prop)};
    for (const auto& g : st.gaps) {
        if (!active(g.status) || !g.selected) continue;
        texts.push_back(g.text);
        consumes.push_back("gap:" + g.gap_id);
    }
    auto text = call_required(
        s, {TemplateId::P5, {{"proposal", format_proposal(prop)}, {"limitations", bullet_text(texts)}}, consumes});
    Proposal cand{prop.title, text::collapse_whitespace(text), prop.version + 1, Provenance::AgentRewritten};
    auto flags = st.flags;
    if (cand.abstract.empty()) flags.push_back("rewrite-empty");
    transition(s, StateTag::MvRewritten, {{"candidate", cand}, {"flags", flags}});
}

void Engine::after_proposal_gate(LiveSession& s) {
    const auto& st = s.state_;
    if (st.last_decision == "reject") {
        open_gate(s, StateTag::GateDGaps);
        return;
    }
    if (!st.last_iterate) {
        transition(s, StateTag::Done,
                   {{"outcome", "rewritten"},
                    {"notices", with(st.notices, "Proposal accepted at version " +
                                                     std::to_string(st.proposal->version) + ".")}});
        return;
    }
    if (st.loop_count >= s.config_.loop_cap) {
        transition(s, StateTag::Done,
                   {{"outcome", "loop-cap"},
                    {"notices", with(st.notices, "Revalidation stopped after " + std::to_string(st.loop_count) +
                                                     " loops (cap reached); the motivation is not validated.")}});
        return;
    }
    auto set = retrieval_set(s, *st.proposal);
    set["pass"] = st.pass + 1;
    set["loop_count"] = st.loop_count + 1;
    transition(s, StateTag::MvRetrieved, std::move(set));
}

void Engine::generate_related(LiveSession& s) {
    const auto& st = s.state_;
    const auto& prop = *st.proposal;
    auto flags = st.flags;
    auto next = st.next_problem;
    std::vector<RelatedProblem> problems;
    if (text::trim(st.problem_statement).empty()) {
        flags.push_back("related-problems-skipped");
    } else {
        agents::Bindings b{{"proposal", format_proposal(prop)}, {"problem_statement", st.problem_statement}};
        for (auto [id, kind] : {std::pair{TemplateId::P7, ProblemKind::Similar},
                                std::pair{TemplateId::P8, ProblemKind::Subtask}}) {
            auto text = call_required(s, {id, b, {proposal_ref(prop)}});
            for (auto& item : agents::parse_bullets(text).items) {
                RelatedProblem p;
                p.problem_id = "pr" + std::to_string(next++);
                p.kind = kind;
                p.text = item;
                p.agent_text = std::move(item);
                problems.push_back(std::move(p));
            }
        }
        if (problems.empty()) flags.push_back("problems-need-author");
    }
    transition(s, StateTag::MsRelatedGenerated, {{"problems", problems}, {"next_problem", next}, {"flags", flags}});
}

void Engine::gather_evidence(LiveSession& s) {
    const auto& st = s.state_;
    std::vector<const RelatedProblem*> problems;
    for (const auto& p : st.problems)
        if (active(p.status)) problems.push_back(&p);
    auto flags = st.flags;

    // Binary question per problem.
    std::vector<CallSpec> qspecs(problems.size());
    std::vector<CallResult> qresults(problems.size());
    for (std::size_t i = 0; i < problems.size(); ++i)
        qspecs[i] = {TemplateId::P9,
                     {{"statement", problems[i]->text}},
                     {"problem:" + problems[i]->problem_id},
                     {{"problem_id", problems[i]->problem_id}}};
    fan_out(s, problems.size(), [&](std::size_t i) { qresults[i] = execute(s, qspecs[i]); });
    std::map<std::string, std::string> questions;
    for (std::size_t i = 0; i < problems.size(); ++i) {
        record(s, qspecs[i], qresults[i]);
        const auto& pid = problems[i]->problem_id;
        std::string q = qresults[i].ok() ? first_line_item(qresults[i].completion->text) : std::string();
        if (q.empty()) {
            flags.push_back("question-fallback:" + pid);
            q = with_question_prefix(problems[i]->text, "proposing a method for");
        } else if (!q.starts_with(kQuestionPrefix)) {
            flags.push_back("auto-prefixed:" + pid);
            q = with_question_prefix(q, "relevant to:");
        }
        questions[pid] = q;
    }

    // Stage-1 retrieval per problem, deduplicated by paper.
    std::vector<std::vector<std::string>> hits_of(problems.size());
    std::map<std::string, MethodPaper> union_hits;
    for (std::size_t i = 0; i < problems.size(); ++i) {
        if (s.corpus_->size() == 0) break;
        for (const auto& h : s.corpus_->retrieve_topk(problems[i]->text, s.config_.k_per_problem, *deps_.embedder)) {
            hits_of[i].push_back(h.paper_id);
            auto [it, fresh] = union_hits.try_emplace(h.paper_id);
            auto& mp = it->second;
            if (fresh) {
                mp.paper_id = h.paper_id;
                mp.title = s.corpus_->lookup(h.paper_id).title;
                mp.score = h.score;
            }
            mp.score = std::max(mp.score, h.score);
            mp.problem_ids.push_back(problems[i]->problem_id);
        }
        std::sort(hits_of[i].begin(), hits_of[i].end());
    }
    std::vector<MethodPaper> method_papers;
    for (auto& [_, mp] : union_hits) method_papers.push_back(std::move(mp));
    std::stable_sort(method_papers.begin(), method_papers.end(),
                     [](const MethodPaper& a, const MethodPaper& b) { return a.score > b.score; });

    std::set<std::string> indexed(st.indexed_papers.begin(), st.indexed_papers.end());
    for (const auto& mp : method_papers) {
        index_paper(s, mp.paper_id, flags);
        indexed.insert(mp.paper_id);
    }

    struct Pair {
        const RelatedProblem* problem;
        std::string paper_id;
        std::vector<docproc::Chunk> chunks;
        std::optional<Error> retrieval_error;
        CallSpec spec;
        CallResult result;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < problems.size(); ++i)
        for (const auto& pid : hits_of[i]) pairs.push_back({problems[i], pid, {}, std::nullopt, {}, {}});
    const auto& uc = user_corpus(s);
    fan_out(s, pairs.size(), [&](std::size_t i) {
        auto& pr = pairs[i];
        const auto& question = questions.at(pr.problem->problem_id);
        try {
            pr.chunks = plain(uc.retrieve_chunks(pr.paper_id, question, s.config_.k_small, *deps_.embedder));
        } catch (const Error& e) {
            pr.retrieval_error = e;
            return;
        }
        pr.spec = {TemplateId::P10,
                   {{"question", question}, {"paper_chunks", chunk_context(pr.chunks)}},
                   {"problem:" + pr.problem->problem_id},
                   {{"problem_id", pr.problem->problem_id},
                    {"paper_id", pr.paper_id},
                    {"chunk_ids", ids_of(pr.chunks)}}};
        pr.result = execute(s, pr.spec);
    });

    std::vector<MethodVerdict> verdicts;
    std::vector<MethodEvidence> evidence;
    auto next = st.next_evidence;
    for (auto& pr : pairs) {
        MethodVerdict v;
        v.problem_id = pr.problem->problem_id;
        v.paper_id = pr.paper_id;
        v.question = questions.at(v.problem_id);
        v.answer = agents::BinaryAnswer{Verdict::Unanswerable, std::nullopt, false, false};
        v.chunk_ids = ids_of(pr.chunks);
        if (pr.retrieval_error) {
            v.error = std::string(to_string(pr.retrieval_error->code())) + ": " + pr.retrieval_error->what();
            emit(s, Actor::System, EventKind::Error,
                 {{"step", "gather-evidence"},
                  {"problem_id", v.problem_id},
                  {"paper_id", v.paper_id},
                  {"code", to_string(pr.retrieval_error->code())},
                  {"message", pr.retrieval_error->what()}});
        } else {
            record(s, pr.spec, pr.result);
            if (pr.result.ok())
                v.answer = agents::parse_binary_answer(pr.result.completion->text);
            else
                v.error = pr.result.failure();
        }
        if (v.answer.verdict == Verdict::Yes) {
            MethodEvidence e;
            e.evidence_id = "e" + std::to_string(next++);
            e.problem_id = v.problem_id;
            e.paper_id = v.paper_id;
            e.title = union_hits.count(v.paper_id) ? s.corpus_->lookup(v.paper_id).title : std::string();
            e.methodology_text = *v.answer.justification;
            e.agent_text = e.methodology_text;
            evidence.push_back(std::move(e));
        }
        verdicts.push_back(std::move(v));
    }
    transition(s, StateTag::MsEvidenceGathered,
               {{"problem_questions", questions},
                {"method_papers", method_papers},
                {"method_verdicts", verdicts},
                {"evidence", evidence},
                {"next_evidence", next},
                {"indexed_papers", std::vector<std::string>(indexed.begin(), indexed.end())},
                {"flags", flags}});
}

void Engine::synthesize(LiveSession& s) {
    const auto& st = s.state_;
    const auto& prop = *st.proposal;
    std::map<std::string, std::string> problem_text;
    for (const auto& p : st.problems) problem_text[p.problem_id] = p.text;
    std::vector<std::string> consumes{proposal_ref(prop), "problem-statement"};
    std::string context;
    std::vector<const MethodEvidence*> accepted;
    for (const auto& e : st.evidence) {
        if (!e.accepted) continue;
        accepted.push_back(&e);
        consumes.push_back("evidence:" + e.evidence_id);
        if (!context.empty()) context += "\n\n";
        context += "Problem: " + problem_text[e.problem_id] + "\nResearch Paper: " + e.title +
                   "\nApproach: " + e.methodology_text;
    }
    if (context.empty()) context = "No approaches from the literature were accepted for this proposal.";
    auto text = call_required(s, {TemplateId::P11,
                                  {{"proposal", format_proposal(prop)},
                                   {"problem", st.problem_statement},
                                   {"method_context", context},
                                   {"n_methods", std::to_string(s.config_.n_methods)}},
                                  consumes,
                                  {{"n_methods", s.config_.n_methods}}});
    auto items = agents::parse_bullets(text).items;
    auto next = st.next_method;
    std::vector<SynthesizedMethod> methods;
    for (auto& item : items) {
        SynthesizedMethod m;
        m.method_id = "m" + std::to_string(next++);
        for (const auto* e : accepted)
            if (cites(item, e->title) &&
                std::find(m.evidence_ids.begin(), m.evidence_ids.end(), e->evidence_id) == m.evidence_ids.end())
                m.evidence_ids.push_back(e->evidence_id);
        m.text = item;
        m.agent_text = std::move(item);
        methods.push_back(std::move(m));
    }
    auto flags = st.flags;
    auto notices = st.notices;
    if (methods.size() < s.config_.n_methods) {
        flags.push_back("fewer-methods:" + std::to_string(methods.size()) + "/" + std::to_string(s.config_.n_methods));
        notices.push_back("The mentor proposed " + std::to_string(methods.size()) + " of " +
                          std::to_string(s.config_.n_methods) + " requested methods.");
    }
    transition(s, StateTag::MsSynthesized,
               {{"methods", methods}, {"next_method", next}, {"flags", flags}, {"notices", notices}});
}

void Engine::rewrite_with_methods(LiveSession& s) {
    const auto& st = s.state_;
    const auto& prop = *st.proposal;
    std::vector<std::string> texts;
    std::vector<std::string> consumes{proposal_ref(prop)};
    for (const auto& m : st.methods) {
        if (!m.accepted) continue;
        texts.push_back(m.text);
        consumes.push_back("method:" + m.method_id);
    }
    auto text = call_required(
        s, {TemplateId::MethodRewrite, {{"proposal", format_proposal(prop)}, {"methods", bullet_text(texts)}}, consumes});
    Proposal cand{prop.title, text::collapse_whitespace(text), prop.version + 1, Provenance::AgentRewritten};
    auto flags = st.flags;
    if (cand.abstract.empty()) flags.push_back("rewrite-empty");
    transition(s, StateTag::MsRewritten, {{"candidate", cand}, {"flags", flags}});
}

void Engine::finish(LiveSession& s) {
    const auto& st = s.state_;
    if (st.last_decision == "reject") {
        open_gate(s, StateTag::GateHMethods);
        return;
    }
    transition(s, StateTag::Done,
               {{"notices", with(st.notices, "Proposal finalized with synthesized methods at version " +
                                                 std::to_string(st.proposal->version) + ".")}});
}

}  // namespace ideation::workflow
