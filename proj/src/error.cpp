#include "cubicpulse/error.hpp"

namespace cubicpulse {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::FitFailure: return "fit-failure";
    case ErrorKind::Range: return "range-error";
    case ErrorKind::Overflow: return "overflow-error";
    case ErrorKind::Format: return "format-error";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::Integrator: return "integrator-failure";
    case ErrorKind::UndefinedState: return "undefined-state";
    }
    return "unknown";
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

} // namespace cubicpulse
