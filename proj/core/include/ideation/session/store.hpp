#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ideation/session/event.hpp"

namespace ideation::session {

struct SessionRecord {
    std::string session_id;
    std::string creator;
    std::string created_at;
    std::string state;  // cached tag, rebuildable from the log
    bool closed = false;
    nlohmann::json config = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const SessionRecord& r);
void from_json(const nlohmann::json& j, SessionRecord& r);

struct LogDiagnostic {
    std::size_t line = 0;  // 1-based line of the first rejected entry
    std::string reason;
};

struct LogReadResult {
    std::vector<LogEvent> events;  // the valid prefix
    std::optional<LogDiagnostic> diagnostic;
};

/// Reads a JSON-lines log, stopping at the first entry that does not parse,
/// breaks event_id monotonicity, or moves time backwards.
LogReadResult read_log(std::istream& in);
LogReadResult read_log_file(const std::filesystem::path& path);

/// Append-only event log for one session. A single writer appends; readers
/// may take `events()` concurrently and always see a consistent prefix.
class SessionLog {
public:
    SessionLog(std::string session_id, std::optional<std::filesystem::path> file,
               std::shared_ptr<Clock> clock, bool durable, std::vector<LogEvent> existing = {});
    ~SessionLog();
    SessionLog(const SessionLog&) = delete;
    SessionLog& operator=(const SessionLog&) = delete;

    const std::string& session_id() const noexcept { return session_id_; }

    /// Assigns the next event_id and a non-decreasing timestamp, writes and
    /// (when durable) fsyncs the line before returning. Throws SessionClosed.
    LogEvent append(Actor actor, EventKind kind, nlohmann::json payload);

    void close();
    bool closed() const;

    std::vector<LogEvent> events() const;
    std::size_t size() const;

private:
    std::string session_id_;
    std::optional<std::filesystem::path> path_;
    std::FILE* file_ = nullptr;
    std::shared_ptr<Clock> clock_;
    bool durable_;
    mutable std::mutex mutex_;
    std::vector<LogEvent> events_;
    std::chrono::system_clock::time_point last_time_{};
    bool closed_ = false;
};

/// Directory of session logs plus an index file. With no directory the store
/// keeps everything in memory.
class SessionStore {
public:
    explicit SessionStore(std::optional<std::filesystem::path> dir = std::nullopt,
                          std::shared_ptr<Clock> clock = std::make_shared<SystemClock>(),
                          bool durable = true);

    /// Creates an empty log. Generates an id unless one is supplied; throws
    /// InvalidArgument if the id already exists.
    std::shared_ptr<SessionLog> create(const std::string& creator, nlohmann::json config,
                                       std::optional<std::string> session_id = std::nullopt);

    /// Live handle for a session created by this store or found on disk.
    std::shared_ptr<SessionLog> open(const std::string& session_id);

    std::uint64_t append_event(const std::string& session_id, Actor actor, EventKind kind,
                               nlohmann::json payload);
    void close(const std::string& session_id);

    void update_record(const std::string& session_id, const std::string& state,
                       const nlohmann::json& snapshot);

    std::vector<SessionRecord> list() const;
    std::optional<SessionRecord> record(const std::string& session_id) const;

    std::optional<std::filesystem::path> log_path(const std::string& session_id) const;
    const std::optional<std::filesystem::path>& dir() const noexcept { return dir_; }
    std::shared_ptr<Clock> clock() const { return clock_; }

private:
    void write_index_locked() const;

    std::optional<std::filesystem::path> dir_;
    std::shared_ptr<Clock> clock_;
    bool durable_;
    mutable std::mutex mutex_;
    std::map<std::string, SessionRecord> records_;
    std::map<std::string, std::shared_ptr<SessionLog>> live_;
    std::uint64_t counter_ = 0;
};

}  // namespace ideation::session
