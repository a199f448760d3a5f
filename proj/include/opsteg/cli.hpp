#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace opsteg::cli {

/// Exit codes; scripts may branch on these.
enum ExitCode : int {
    kOk = 0,
    kInputError = 2,  // usage, unreadable file, parse or config error
    kInsufficientCapacity = 3,
    kNoMessage = 4,  // truncated message or implausible length header
    kVersionMismatch = 5,
};

/// Trailer key holding the embed-time version tag (written only when the
/// config's tag is non-empty).
inline constexpr const char* kVersionTagKey = "OpStegTag";

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opsteg::cli
