#pragma once

#include <iosfwd>

namespace humpforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitTruncated = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitInput = 66;

/// Entry point for the humpforge command line; returns the process exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace humpforge::cli
