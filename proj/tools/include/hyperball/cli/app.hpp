#pragma once

#include <iosfwd>

namespace hyperball::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kParse = 4,
  kValidation = 5,
  kConvergence = 6,
  kNumerical = 7,
  kCollapse = 8,
  kInternal = 9,
};

/// Parses arguments, runs one subcommand and maps failures to exit codes.
/// Errors are reported on `err` as one JSON line
/// {"error":{"category":...,"message":...}}.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hyperball::cli
