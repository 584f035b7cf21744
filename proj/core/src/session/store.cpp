#include "ideation/session/store.hpp"

#include <fstream>
#include <sstream>
#include <unistd.h>

#include "ideation/error.hpp"
#include "ideation/text.hpp"

namespace ideation::session {

void to_json(nlohmann::json& j, const SessionRecord& r) {
    j = nlohmann::json{{"session_id", r.session_id}, {"creator", r.creator}, {"created_at", r.created_at},
                       {"state", r.state},           {"closed", r.closed},   {"config", r.config}};
}

void from_json(const nlohmann::json& j, SessionRecord& r) {
    r.session_id = j.at("session_id").get<std::string>();
    r.creator = j.value("creator", "");
    r.created_at = j.value("created_at", "");
    r.state = j.value("state", "");
    r.closed = j.value("closed", false);
    r.config = j.value("config", nlohmann::json::object());
}

LogReadResult read_log(std::istream& in) {
    LogReadResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        LogEvent e;
        try {
            e = nlohmann::json::parse(line).get<LogEvent>();
        } catch (const std::exception& ex) {
            result.diagnostic = LogDiagnostic{line_no, ex.what()};
            break;
        }
        if (!result.events.empty()) {
            const auto& prev = result.events.back();
            if (e.event_id <= prev.event_id) {
                result.diagnostic = LogDiagnostic{line_no, "event_id " + std::to_string(e.event_id) +
                                                                " does not increase"};
                break;
            }
            if (e.timestamp < prev.timestamp) {
                result.diagnostic = LogDiagnostic{line_no, "timestamp moves backwards"};
                break;
            }
        }
        result.events.push_back(std::move(e));
    }
    return result;
}

LogReadResult read_log_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::NotFound, "no session log at " + path.string());
    return read_log(in);
}

SessionLog::SessionLog(std::string session_id, std::optional<std::filesystem::path> file,
                       std::shared_ptr<Clock> clock, bool durable, std::vector<LogEvent> existing)
    : session_id_(std::move(session_id)),
      path_(std::move(file)),
      clock_(std::move(clock)),
      durable_(durable),
      events_(std::move(existing)) {
    if (path_) {
        file_ = std::fopen(path_->c_str(), "ab");
        if (!file_) fail(ErrorCode::Io, "cannot open session log " + path_->string());
    }
}

SessionLog::~SessionLog() {
    if (file_) std::fclose(file_);
}

LogEvent SessionLog::append(Actor actor, EventKind kind, nlohmann::json payload) {
    std::lock_guard lock(mutex_);
    if (closed_) fail(ErrorCode::SessionClosed, "session " + session_id_ + " is closed");
    auto now = clock_->now();
    if (now < last_time_) now = last_time_;
    last_time_ = now;

    LogEvent e;
    e.event_id = events_.empty() ? 1 : events_.back().event_id + 1;
    e.timestamp = format_utc(now);
    if (!events_.empty() && e.timestamp < events_.back().timestamp) e.timestamp = events_.back().timestamp;
    e.actor = actor;
    e.kind = kind;
    e.payload = std::move(payload);

    if (file_) {
        auto line = canonical_line(e);
        line += '\n';
        if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0)
            fail(ErrorCode::Io, "write failed for session log " + path_->string());
        if (durable_) ::fsync(::fileno(file_));
    }
    events_.push_back(e);
    return e;
}

void SessionLog::close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    if (file_) {
        std::fclose(file_);
        file_ = nullptr;
    }
}

bool SessionLog::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

std::vector<LogEvent> SessionLog::events() const {
    std::lock_guard lock(mutex_);
    return events_;
}

std::size_t SessionLog::size() const {
    std::lock_guard lock(mutex_);
    return events_.size();
}

SessionStore::SessionStore(std::optional<std::filesystem::path> dir, std::shared_ptr<Clock> clock,
                           bool durable)
    : dir_(std::move(dir)), clock_(std::move(clock)), durable_(durable) {
    if (!dir_) return;
    std::filesystem::create_directories(*dir_);
    std::ifstream in(*dir_ / "index.json");
    if (!in) return;
    try {
        auto j = nlohmann::json::parse(in);
        for (const auto& r : j.value("sessions", nlohmann::json::array())) {
            auto rec = r.get<SessionRecord>();
            records_[rec.session_id] = rec;
        }
        counter_ = j.value("counter", std::uint64_t{0});
    } catch (const std::exception&) {
        // A broken index is only a cache; logs remain authoritative.
    }
}

void SessionStore::write_index_locked() const {
    if (!dir_) return;
    nlohmann::json j{{"counter", counter_}, {"sessions", nlohmann::json::array()}};
    for (const auto& [_, r] : records_) j["sessions"].push_back(r);
    auto tmp = *dir_ / "index.json.tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, *dir_ / "index.json");
}

std::shared_ptr<SessionLog> SessionStore::create(const std::string& creator, nlohmann::json config,
                                                 std::optional<std::string> session_id) {
    std::lock_guard lock(mutex_);
    std::string id;
    if (session_id) {
        id = *session_id;
        if (id.empty() || id.find_first_of("/\\") != std::string::npos)
            fail(ErrorCode::InvalidArgument, "invalid session id '" + id + "'");
    } else {
        do {
            id = "s" + std::to_string(++counter_);
        } while (records_.contains(id));
    }
    if (records_.contains(id)) fail(ErrorCode::InvalidArgument, "session '" + id + "' already exists");

    std::optional<std::filesystem::path> file;
    if (dir_) {
        file = *dir_ / (id + ".log.jsonl");
        std::filesystem::remove(*file);
    }
    auto log = std::make_shared<SessionLog>(id, file, clock_, durable_);
    records_[id] = SessionRecord{id, creator, format_utc(clock_->now()), "", false, std::move(config)};
    live_[id] = log;
    write_index_locked();
    return log;
}

std::shared_ptr<SessionLog> SessionStore::open(const std::string& session_id) {
    std::lock_guard lock(mutex_);
    if (auto it = live_.find(session_id); it != live_.end()) return it->second;
    if (!dir_) fail(ErrorCode::NotFound, "unknown session '" + session_id + "'");
    auto file = *dir_ / (session_id + ".log.jsonl");
    if (!std::filesystem::exists(file)) fail(ErrorCode::NotFound, "unknown session '" + session_id + "'");
    auto read = read_log_file(file);
    if (read.diagnostic)
        fail(ErrorCode::CorruptLog, "session '" + session_id + "' log is corrupt at line " +
                                        std::to_string(read.diagnostic->line) + ": " + read.diagnostic->reason);
    auto log = std::make_shared<SessionLog>(session_id, file, clock_, durable_, std::move(read.events));
    if (auto rec = records_.find(session_id); rec != records_.end() && rec->second.closed) log->close();
    live_[session_id] = log;
    return log;
}

std::uint64_t SessionStore::append_event(const std::string& session_id, Actor actor, EventKind kind,
                                         nlohmann::json payload) {
    return open(session_id)->append(actor, kind, std::move(payload)).event_id;
}

void SessionStore::close(const std::string& session_id) {
    auto log = open(session_id);
    log->close();
    std::lock_guard lock(mutex_);
    records_[session_id].closed = true;
    write_index_locked();
}

void SessionStore::update_record(const std::string& session_id, const std::string& state,
                                 const nlohmann::json& snapshot) {
    std::lock_guard lock(mutex_);
    auto it = records_.find(session_id);
    if (it == records_.end()) return;
    it->second.state = state;
    write_index_locked();
    if (dir_) {
        std::ofstream out(*dir_ / (session_id + ".snapshot.json"), std::ios::trunc);
        out << snapshot.dump() << '\n';
    }
}

std::vector<SessionRecord> SessionStore::list() const {
    std::lock_guard lock(mutex_);
    std::vector<SessionRecord> out;
    for (const auto& [_, r] : records_) out.push_back(r);
    return out;
}

std::optional<SessionRecord> SessionStore::record(const std::string& session_id) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find(session_id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::filesystem::path> SessionStore::log_path(const std::string& session_id) const {
    if (!dir_) return std::nullopt;
    return *dir_ / (session_id + ".log.jsonl");
}

}  // namespace ideation::session
