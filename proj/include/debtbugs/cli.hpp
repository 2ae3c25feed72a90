#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace debtbugs {

/// Runs one `debtbugs` subcommand. `args` excludes the program name. Data
/// goes to the --out files (or `out` when none is given), diagnostics to
/// `err`. Returns the process exit code: 0 success, 1 usage, 2 data error,
/// 3 precondition error, 4 I/O error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace debtbugs
