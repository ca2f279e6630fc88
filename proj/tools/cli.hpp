#pragma once

#include <iosfwd>

namespace sentinel::cli {

/// Exit codes of `score`: worst decision across the input.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFlag = 2;
inline constexpr int kExitExclude = 3;

/// Entry point shared by the binary and the tests. Output that `--out -`
/// would send to standard output goes to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sentinel::cli
