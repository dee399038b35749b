#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tasep::cli {

/// Runs the `tasep` command line with `args` (program name excluded).
/// Returns the process exit code: 0 success, 1 error, 2 failed check.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tasep::cli
