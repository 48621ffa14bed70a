#include "popchaos/mean_dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "popchaos/chaos.hpp"
#include "popchaos/error.hpp"
#include "popchaos/simulate.hpp"

namespace popchaos {

MeanState::MeanState(double y, double var_x) : y_(y), var_x_(var_x) {
  if (!(var_x >= 0.0)) {
    throw DomainError(
        fmt::format("population variance must be >= 0, got {}", var_x));
  }
}

double logistic_mean_update(double r, const MeanState& state) {
  const double y = state.y();
  return r * y * (1.0 - y) - r * state.var_x();
}

double ricker_mean_update(double r, const MeanState& state,
                          ExpansionOrder order) {
  const double y = state.y();
  const double growth = std::exp(r * (1.0 - y));
  const double leading = y * growth;
  if (order == ExpansionOrder::leading) return leading;
  return leading + growth * (0.5 * r * r * y - r) * state.var_x();
}

std::vector<ConvergenceRecord> convergence_sweep(
    MapKind kind, double r, std::span<const double> ladder, std::size_t t_max,
    const ConvergenceOptions& options) {
  if (ladder.empty()) {
    throw DomainError("convergence sweep needs a non-empty variance ladder");
  }
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] >= 0.0) || (i > 0 && !(ladder[i] < ladder[i - 1]))) {
      throw DomainError(
          "variance ladder must be non-negative and strictly decreasing");
    }
  }
  if (!(options.noise_scale >= 0.0)) {
    throw DomainError("noise scale must be >= 0");
  }
  const double y0 = options.y0.value_or(default_x0(kind));
  if (!admissible(kind, y0)) {
    throw DomainError(fmt::format("initial mean {} is not admissible for the "
                                  "{} map",
                                  y0, to_string(kind)));
  }

  std::vector<double> orbit(t_max + 1);
  orbit[0] = y0;
  for (std::size_t t = 1; t <= t_max; ++t) {
    orbit[t] = det_step(kind, r, orbit[t - 1]);
  }

  const MapSpec map(kind, r);
  std::vector<ConvergenceRecord> records;
  for (const double level : ladder) {
    InitialCondition init = PointInit{y0};
    if (level > 0.0) init = GammaParams::fit_from_moments(y0, level);
    const NoiseSpec noise(options.noise_scale * level);
    const EnsembleStats stats = run_ensemble(
        map, init, noise, t_max, options.n_traj, options.seed, options.parallel);
    double worst = 0.0;
    for (std::size_t t = 0; t <= t_max; ++t) {
      worst = std::max(worst, std::abs(stats.mean[t] - orbit[t]));
    }
    records.push_back({level, worst});
  }
  return records;
}

}  // namespace popchaos
