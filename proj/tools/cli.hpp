#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swnehari::cli {

enum ExitCode : int {
  kOk = 0,
  kAssertionFailure = 1,
  kConfigError = 2,
  kSolverFailure = 3,
};

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swnehari::cli
