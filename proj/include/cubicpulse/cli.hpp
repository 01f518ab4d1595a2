#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubicpulse/fixed_point.hpp"

namespace cubicpulse::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitFormat = 3,
    kExitNumeric = 4,
    kExitInternal = 5,
};

/// Runs one invocation; `args` excludes the program name. Errors go to `err`
/// as a single JSON object and select the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

nlohmann::json to_json(const FixedPointFormat& f);
FixedPointFormat format_from_json(const nlohmann::json& j, FixedPointFormat base = {});

} // namespace cubicpulse::cli
