#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace popchaos::cli {

struct SelfCheckOptions {
  std::size_t n_traj = 200000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

/// Fast invariant suite over the installed library: moment identities,
/// equilibrium residuals, stationarity z-tests, the mean recursions and the
/// chaos oracles.
std::vector<CheckResult> self_check(const SelfCheckOptions& options);

}  // namespace popchaos::cli
