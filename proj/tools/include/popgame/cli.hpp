#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace popgame::cli {

/// Exit status contract of the popgame tool.
enum ExitCode : int {
  kOk = 0,
  kPropertyFails = 1,
  kUsage = 2,
  kBudget = 3,
};

/// Runs the tool on `args` (without the program name). Reports go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace popgame::cli
