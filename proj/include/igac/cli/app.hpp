#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace igac::cli {

enum ExitCode : int { success = 0, config_error = 1, numerical_error = 2, usage_error = 64 };

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out`; usage text and error JSON go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace igac::cli
