#pragma once

#include <ostream>

namespace sqent::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 2;
inline constexpr int kInvariantError = 3;
inline constexpr int kNotConverged = 4;
inline constexpr int kIoError = 5;

/// Entry point of the sqent tool; JSON goes to `out`, diagnostics to `err`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sqent::cli
