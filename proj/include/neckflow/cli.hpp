#pragma once

// Command-line front end. Subcommands: evolve, search, sweep, soliton,
// compare, fit, hermite. Exit codes: 0 success, 1 usage, 2 numerical
// failure, 3 I/O.

#include <iosfwd>
#include <string>
#include <vector>

namespace neckflow::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace neckflow::cli
