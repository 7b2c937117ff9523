#pragma once

#include <ostream>

namespace ortest::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitNumeric = 3,
  kExitInternal = 4,
};

/// Entry point of the `ortest` command. Never throws; failures are reported
/// on `err` and mapped to an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ortest::cli
