#include "ideation/session/event.hpp"

#include <array>
#include <ctime>

#include "ideation/error.hpp"

namespace ideation::session {

namespace {
constexpr std::array<std::pair<Actor, std::string_view>, 4> kActors = {{
    {Actor::Researcher, "researcher"},
    {Actor::Colleague, "colleague"},
    {Actor::Mentor, "mentor"},
    {Actor::System, "system"},
}};
constexpr std::array<std::pair<EventKind, std::string_view>, 6> kKinds = {{
    {EventKind::StateTransition, "state-transition"},
    {EventKind::LlmCall, "llm-call"},
    {EventKind::LlmResponse, "llm-response"},
    {EventKind::GateOpen, "gate-open"},
    {EventKind::GateEdit, "gate-edit"},
    {EventKind::Error, "error"},
}};
}  // namespace

std::string_view to_string(Actor a) noexcept {
    for (auto [v, s] : kActors)
        if (v == a) return s;
    return "system";
}

Actor actor_from_string(std::string_view s) {
    for (auto [v, name] : kActors)
        if (name == s) return v;
    fail(ErrorCode::CorruptLog, "unknown actor '" + std::string(s) + "'");
}

std::string_view to_string(EventKind k) noexcept {
    for (auto [v, s] : kKinds)
        if (v == k) return s;
    return "error";
}

EventKind event_kind_from_string(std::string_view s) {
    for (auto [v, name] : kKinds)
        if (name == s) return v;
    fail(ErrorCode::CorruptLog, "unknown event kind '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const LogEvent& e) {
    j = nlohmann::json{{"event_id", e.event_id},
                       {"timestamp", e.timestamp},
                       {"actor", to_string(e.actor)},
                       {"kind", to_string(e.kind)},
                       {"payload", e.payload}};
}

void from_json(const nlohmann::json& j, LogEvent& e) {
    try {
        if (!j.is_object()) fail(ErrorCode::CorruptLog, "event is not an object");
        e.event_id = j.at("event_id").get<std::uint64_t>();
        e.timestamp = j.at("timestamp").get<std::string>();
        e.actor = actor_from_string(j.at("actor").get<std::string>());
        e.kind = event_kind_from_string(j.at("kind").get<std::string>());
        e.payload = j.at("payload");
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCode::CorruptLog, std::string("malformed event: ") + ex.what());
    }
}

std::string canonical_line(const LogEvent& e) { return nlohmann::json(e).dump(); }

std::string format_utc(std::chrono::system_clock::time_point t) {
    using namespace std::chrono;
    const auto ms = duration_cast<milliseconds>(t.time_since_epoch()).count();
    auto secs = static_cast<std::time_t>(ms / 1000);
    auto frac = ms % 1000;
    if (frac < 0) {
        frac += 1000;
        --secs;
    }
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(frac));
    return buf;
}

}  // namespace ideation::session
