#pragma once

#include <iosfwd>

namespace hampath::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,         // bad flags, unreadable input, invalid parameters
    kDomain = 2,        // singular time, degenerate pin matrix, ...
    kCheckFailed = 3,   // `verify` ran but a check missed its tolerance
};

/// Runs the tool. Results go to `out` (or --out), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hampath::cli
