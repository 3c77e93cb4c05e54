#pragma once

#include <optional>
#include <ostream>
#include <string>

namespace foilwind {

enum ExitCode : int {
    exit_success = 0,
    exit_config_error = 2,
    exit_solver_error = 3,
    exit_io_error = 4,
};

// Overrides the configured output directory; a command line flag wins over it.
inline constexpr const char* output_dir_env = "FOILWIND_OUTPUT_DIR";

struct RunOptions {
    std::string command;     // solve, sweep, profiles, oracle-compare, dump-matrices
    std::string config_path;
    std::optional<double> frequency;
    std::optional<std::string> output_dir;
};

// Runs one command and writes its files plus manifest.json into the output
// directory. Progress goes to `log`, diagnostics to `err`. Never throws.
int run(const RunOptions& options, std::ostream& log, std::ostream& err);

}  // namespace foilwind
