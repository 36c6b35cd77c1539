#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hyperdist::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

/// Run one invocation. `args` excludes the program name. Results go to `out`
/// (or files named by flags), a one-line JSON error to `err` on failure.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace hyperdist::cli
