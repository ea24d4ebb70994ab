#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fieldsense::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kSuccess = 0,
    kIoError = 1,
    kUsageError = 2,
    kNumericalError = 3,
};

/// Runs `fieldsense <subcommand> ...`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fieldsense::cli
