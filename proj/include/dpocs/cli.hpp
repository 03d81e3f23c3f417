#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dpocs {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitNumerical = 2,
    kExitIo = 3,
};

/// Runs the `dpocs` command line. `args` excludes the program name. The JSON
/// report goes to `out` unless an --output file is given; diagnostics go to
/// `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpocs
