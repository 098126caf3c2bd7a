#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace torusflow::cli {

enum ExitCode : int {
    kSuccess = 0,
    kVerificationFailure = 1,
    kUsageError = 2,
    kRuntimeError = 3,
};

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out` unless --out is given; messages go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace torusflow::cli
