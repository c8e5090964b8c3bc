#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace padbench::cli {

/// Process exit codes: stable contract for scripts.
enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

/// Runs the padbench command line. Output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace padbench::cli
