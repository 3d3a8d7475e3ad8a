#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ellab::cli {

enum ExitCode : int { exit_ok = 0, exit_input = 1, exit_numeric = 2, exit_io = 3 };

// Parses `args` (without the program name), runs the subcommand and maps
// errors to exit codes. Progress goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Renders a trajectory report file as SVG.
int plot_command(const std::string& report_path, const std::string& svg_path, std::ostream& err);

}  // namespace ellab::cli
