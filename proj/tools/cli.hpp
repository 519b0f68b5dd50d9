#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hjscc::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum Exit : int {
    kOk = 0,
    kInvariantFailure = 1,
    kParseError = 2,
    kNoConvergence = 3,
    kInfeasible = 4,
    kResource = 5,
};

// Runs one command line (without the program name). Human-readable output
// goes to `out`, diagnostics to `err`; the return value is the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hjscc::cli
