#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace surecov::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

/// Maps a library exception to the process exit code.
int exit_code_for(const std::exception& e);

/// Runs the command line `args` (without the program name). Reports go to
/// `out`, diagnostics to `err`; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace surecov::cli
