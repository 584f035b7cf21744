#include "ideation/session/replay.hpp"

#include "ideation/error.hpp"

namespace ideation::session {

ReplayResult replay_events(std::span<const LogEvent> events) {
    ReplayResult out;
    for (std::size_t i = 0; i < events.size(); ++i) {
        try {
            workflow::apply_event(out.state, events[i]);
        } catch (const Error& e) {
            out.diagnostic = LogDiagnostic{i + 1, e.what()};
            break;
        }
        ++out.applied;
    }
    return out;
}

ReplayResult replay_file(const std::filesystem::path& log_path) {
    auto read = read_log_file(log_path);
    auto out = replay_events(read.events);
    if (!out.diagnostic && read.diagnostic) out.diagnostic = read.diagnostic;
    return out;
}

}  // namespace ideation::session
