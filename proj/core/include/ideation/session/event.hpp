#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace ideation::session {

enum class Actor { Researcher, Colleague, Mentor, System };
enum class EventKind { StateTransition, LlmCall, LlmResponse, GateOpen, GateEdit, Error };

std::string_view to_string(Actor a) noexcept;
Actor actor_from_string(std::string_view s);
std::string_view to_string(EventKind k) noexcept;
EventKind event_kind_from_string(std::string_view s);

struct LogEvent {
    std::uint64_t event_id = 0;
    std::string timestamp;  // RFC 3339 UTC, millisecond precision
    Actor actor = Actor::System;
    EventKind kind = EventKind::StateTransition;
    nlohmann::json payload = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const LogEvent& e);
/// Throws ideation::Error(CorruptLog) for missing or mistyped fields.
void from_json(const nlohmann::json& j, LogEvent& e);

/// One log line: sorted keys, no insignificant whitespace.
std::string canonical_line(const LogEvent& e);

class Clock {
public:
    virtual ~Clock() = default;
    virtual std::chrono::system_clock::time_point now() = 0;
};

class SystemClock final : public Clock {
public:
    std::chrono::system_clock::time_point now() override { return std::chrono::system_clock::now(); }
};

/// Deterministic clock for tests and golden runs: starts at `start` and
/// advances by `step` on every read.
class ManualClock final : public Clock {
public:
    explicit ManualClock(std::chrono::system_clock::time_point start = {},
                         std::chrono::milliseconds step = std::chrono::milliseconds(1))
        : current_(start), step_(step) {}

    std::chrono::system_clock::time_point now() override {
        std::lock_guard lock(mutex_);
        auto t = current_;
        current_ += step_;
        return t;
    }

private:
    std::mutex mutex_;
    std::chrono::system_clock::time_point current_;
    std::chrono::milliseconds step_;
};

std::string format_utc(std::chrono::system_clock::time_point t);

}  // namespace ideation::session
