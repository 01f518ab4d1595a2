#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cubicpulse {

enum class ErrorKind {
    InvalidArgument,
    FitFailure,
    Range,
    Overflow,
    Format,
    Io,
    Integrator,
    UndefinedState,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool cond, const std::string& message) {
    if (!cond)
        fail(ErrorKind::InvalidArgument, message);
}

} // namespace cubicpulse
