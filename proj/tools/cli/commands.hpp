#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace occtime::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kUsageError = 1,
  kValidationFailure = 2,
  kNumericalFailure = 3,
};

/// Parses `args` (without the program name) and runs one command. Results go
/// to `out` (or to --out), validation violations and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Inclusive linear grid "start:stop:count"; a single number is a one-point grid.
std::vector<double> parse_grid(const std::string& text);

}  // namespace occtime::cli
