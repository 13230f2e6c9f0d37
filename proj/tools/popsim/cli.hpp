#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace popsim::cli {

/// Parses `args` (without the program name), runs the selected subcommand and
/// returns the process exit code. Primary output goes to `out` unless --out
/// names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace popsim::cli
