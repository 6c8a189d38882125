#pragma once

#include <iosfwd>

namespace salfuse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNoConvergence = 3;

// Entry point of the `salfuse` tool. Data goes to files or `out`, logs to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace salfuse::cli
