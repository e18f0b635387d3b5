#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spinner::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kCapHalted = 3,
};

/// Runs the command line `args` (without the program name). Results go to
/// `out`, log lines and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spinner::cli
