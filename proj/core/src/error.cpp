#include "ideation/error.hpp"

namespace ideation {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::NotFound: return "not-found";
        case ErrorCode::PreconditionFailed: return "precondition-failed";
        case ErrorCode::ProviderUnreachable: return "provider-unreachable";
        case ErrorCode::ProviderRejected: return "provider-rejected-input";
        case ErrorCode::Timeout: return "timeout";
        case ErrorCode::BudgetExhausted: return "budget-exhausted";
        case ErrorCode::FixtureMiss: return "fixture-miss";
        case ErrorCode::ParseError: return "parse-error";
        case ErrorCode::UnboundSlot: return "unbound-slot";
        case ErrorCode::UnknownTemplate: return "unknown-template";
        case ErrorCode::StaleGate: return "stale-gate";
        case ErrorCode::SessionClosed: return "session-closed";
        case ErrorCode::CorruptLog: return "corrupt-log";
        case ErrorCode::Config: return "config";
        case ErrorCode::PortInUse: return "port-in-use";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace ideation
