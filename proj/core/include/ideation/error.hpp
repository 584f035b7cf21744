#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ideation {

enum class ErrorCode {
    InvalidArgument,
    NotFound,
    PreconditionFailed,
    ProviderUnreachable,
    ProviderRejected,
    Timeout,
    BudgetExhausted,
    FixtureMiss,
    ParseError,
    UnboundSlot,
    UnknownTemplate,
    StaleGate,
    SessionClosed,
    CorruptLog,
    Config,
    PortInUse,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Transient provider conditions that a caller may retry.
    bool retryable() const noexcept {
        return code_ == ErrorCode::ProviderUnreachable || code_ == ErrorCode::Timeout;
    }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace ideation
