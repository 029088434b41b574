#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace robkf::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInputError = 2,
  kNumericFailure = 3,
};

/// Parses `args` (args[0] is the program name) and runs one subcommand.
/// Results go to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace robkf::cli
