#pragma once

#include <ostream>

namespace m2m {

// Exit codes, one per error category.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInvalidArgument = 3;
inline constexpr int kExitConfig = 4;
inline constexpr int kExitInfeasible = 5;
inline constexpr int kExitUnfittable = 6;
inline constexpr int kExitIo = 7;

/// Runs the command line front end. Diagnostics go to `err` as a single
/// "error: <category>: <message>" line; results go to files under --out.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace m2m
