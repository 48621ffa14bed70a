#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace popchaos::cli {

inline constexpr std::uint64_t kDefaultSeed = 20250101;

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInfeasible = 2,
  kExitNumerical = 3,
};

/// Runs one command line (without the program name). Tables go to --output
/// when given, otherwise to `out`; summary and verdict lines then go to
/// `out` or `err` respectively, so stdout stays a clean table.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace popchaos::cli
