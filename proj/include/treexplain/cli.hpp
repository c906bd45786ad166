#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace treexplain {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // verification failed or unclassified error
  kExitUsage = 2,
  kExitTooManyFeatures = 3,
  kExitIo = 4,
  kExitInvalidModel = 5,
};

// Runs the command line (args excludes the program name). Data goes to `out`
// unless an output path is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace treexplain
