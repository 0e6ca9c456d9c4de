#pragma once

#include <iosfwd>

namespace odorsim::cli {

/// Exit codes of the odorsim tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInvalidConfig = 2,
  kNumericalAbort = 3,
  kSingularCoupling = 4,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace odorsim::cli
