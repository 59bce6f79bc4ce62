// The segfst command-line tool.

#pragma once

#include <string>

namespace segfst::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitScorer = 3,
};

/// Runs the tool on argv-style arguments and returns the process exit code.
int Run(int argc, const char* const* argv);

}  // namespace segfst::cli
