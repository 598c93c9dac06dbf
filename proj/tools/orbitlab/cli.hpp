#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace orbitlab::cli {

enum ExitCode : int {
  kOk = 0,
  kInconclusive = 1,  // only with --strict
  kUsage = 2,
  kAnalysisFailure = 3,
};

/// Runs one orbitlab invocation. `args` excludes the program name. Reports go
/// to `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orbitlab::cli
