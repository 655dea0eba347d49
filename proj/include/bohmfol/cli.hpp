#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bohmfol::cli {

inline constexpr const char *kVersion = "bohmfol 1.0.0";

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,          ///< bad arguments or configuration
  kProtocolFailure = 3, ///< the simulated experiment could not complete
  kCheckFailed = 4,     ///< a property suite reported a failure
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Reports go to `out` (or the --out file), diagnostics to
/// `err`.
int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

} // namespace bohmfol::cli
