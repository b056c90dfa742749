#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bcheun::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNotConverged = 2 };

/// Runs one command line (without the program name). Data rows go to `out`, diagnostics and
/// --meta records to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bcheun::cli
