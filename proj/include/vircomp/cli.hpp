#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vircomp::cli {

enum ExitCode : int { kOk = 0, kInvalid = 1, kSolverFailure = 2 };

/// Entry point behind the `vircomp` binary; `args` excludes the program name.
/// Artifacts go to `--out`, diagnostics to `err`, short summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vircomp::cli
