#pragma once

#include <iosfwd>

namespace srgcert {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitSchema = 2,
    kExitNumerical = 3,
    kExitSoundness = 4,
};

/// Parses arguments, runs one command and maps failures to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace srgcert
