#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace regrasp::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kNotReached = 2, kInputError = 3, kNumericFailure = 4 };

/// Runs the `regrasp` command line. `args` excludes the program name.
/// Summary lines go to `out` as key=value pairs; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace regrasp::cli
