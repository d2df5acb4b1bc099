#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gbspe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;

/// Runs the command line `args` (program name excluded). Results go to
/// `out`, diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gbspe::cli
