#include "popchaos/simulate.hpp"

#include <cmath>
#include <random>

#include <fmt/core.h>

#include "popchaos/error.hpp"
#include "popchaos/parallel.hpp"
#include "popchaos/running_moments.hpp"

namespace popchaos {

namespace {

constexpr std::size_t kTrajectoriesPerBlock = 1024;

// Per-trajectory noise source; holds one distribution object so repeated
// draws reuse its state the same way on every run.
class NoiseSampler {
 public:
  explicit NoiseSampler(const NoiseSpec& spec) : variance_(spec.variance()) {
    if (variance_ == 0.0) return;
    if (spec.family() == NoiseFamily::gamma) {
      gamma_.emplace(1.0 / variance_, variance_);
    } else {
      const double log_var = std::log1p(variance_);
      lognormal_.emplace(-0.5 * log_var, std::sqrt(log_var));
    }
  }

  double operator()(Stream& stream) {
    if (gamma_) return (*gamma_)(stream);
    if (lognormal_) return (*lognormal_)(stream);
    return 1.0;
  }

 private:
  double variance_;
  std::optional<std::gamma_distribution<double>> gamma_;
  std::optional<std::lognormal_distribution<double>> lognormal_;
};

struct BlockResult {
  std::vector<RunningMoments> moments;
  std::vector<std::size_t> escapes;  // escapes first recorded at step t
};

}  // namespace

MapSpec::MapSpec(MapKind kind, double r) : kind_(kind), r_(r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError(fmt::format("growth rate r must be positive, got {}", r));
  }
}

bool admissible(MapKind kind, double x) {
  if (kind == MapKind::logistic) return x > 0.0 && x < 1.0;
  return x > 0.0 && x < kRickerStateCap;
}

double noise_draw(const NoiseSpec& spec, Stream& stream) {
  NoiseSampler sampler(spec);
  return sampler(stream);
}

double step(const MapSpec& map, double x, double eps) {
  return det_step(map.kind(), map.r(), x) * eps;
}

Trajectory run_trajectory(const MapSpec& map, double x0, const NoiseSpec& noise,
                          std::size_t t_max, Stream& stream) {
  if (!(x0 >= 0.0) || !std::isfinite(x0)) {
    throw DomainError(fmt::format("initial state must be >= 0, got {}", x0));
  }
  if (t_max < 1) {
    throw DomainError("trajectory length t_max must be >= 1");
  }
  NoiseSampler eps(noise);
  Trajectory traj;
  traj.values.reserve(t_max + 1);
  traj.values.push_back(x0);
  double x = x0;
  for (std::size_t t = 1; t <= t_max; ++t) {
    x = step(map, x, eps(stream));
    traj.values.push_back(x);
    if (!admissible(map.kind(), x)) {
      traj.escape_step = t;
      break;
    }
  }
  return traj;
}

double draw_initial(const InitialCondition& init, Stream& stream) {
  return std::visit(
      [&stream](const auto& ic) -> double {
        using T = std::decay_t<decltype(ic)>;
        if constexpr (std::is_same_v<T, PointInit>) {
          return ic.x0;
        } else if constexpr (std::is_same_v<T, GammaParams>) {
          return sample_one(ic, stream);
        } else if constexpr (std::is_same_v<T, UniformInit>) {
          return ic.lo + (ic.hi - ic.lo) * stream.uniform01();
        } else {
          const double log_var = std::log1p(ic.variance / (ic.mean * ic.mean));
          std::lognormal_distribution<double> dist(
              std::log(ic.mean) - 0.5 * log_var, std::sqrt(log_var));
          return dist(stream);
        }
      },
      init);
}

double initial_mean(const InitialCondition& init) {
  return std::visit(
      [](const auto& ic) -> double {
        using T = std::decay_t<decltype(ic)>;
        if constexpr (std::is_same_v<T, PointInit>) {
          return ic.x0;
        } else if constexpr (std::is_same_v<T, GammaParams>) {
          return ic.mean();
        } else if constexpr (std::is_same_v<T, UniformInit>) {
          return 0.5 * (ic.lo + ic.hi);
        } else {
          return ic.mean;
        }
      },
      init);
}

double initial_variance(const InitialCondition& init) {
  return std::visit(
      [](const auto& ic) -> double {
        using T = std::decay_t<decltype(ic)>;
        if constexpr (std::is_same_v<T, PointInit>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, GammaParams>) {
          return ic.variance();
        } else if constexpr (std::is_same_v<T, UniformInit>) {
          const double w = ic.hi - ic.lo;
          return w * w / 12.0;
        } else {
          return ic.variance;
        }
      },
      init);
}

EnsembleStats run_ensemble(const MapSpec& map, const InitialCondition& init,
                           const NoiseSpec& noise, std::size_t t_max,
                           std::size_t n_traj, std::uint64_t seed,
                           ParallelOptions parallel) {
  if (n_traj < 2) {
    throw DomainError(
        fmt::format("ensemble needs at least 2 trajectories, got {}", n_traj));
  }
  if (const auto* point = std::get_if<PointInit>(&init);
      point && !(point->x0 >= 0.0)) {
    throw DomainError(
        fmt::format("initial state must be >= 0, got {}", point->x0));
  }

  const std::size_t n_blocks =
      (n_traj + kTrajectoriesPerBlock - 1) / kTrajectoriesPerBlock;
  std::vector<BlockResult> blocks(n_blocks);

  parallel_for(n_blocks, parallel.threads, [&](std::size_t b) {
    BlockResult& out = blocks[b];
    out.moments.resize(t_max + 1);
    out.escapes.assign(t_max + 1, 0);
    const std::size_t first = b * kTrajectoriesPerBlock;
    const std::size_t last = std::min(n_traj, first + kTrajectoriesPerBlock);
    for (std::size_t i = first; i < last; ++i) {
      Stream stream(seed, i);
      NoiseSampler eps(noise);
      double x = draw_initial(init, stream);
      out.moments[0].add(x);
      for (std::size_t t = 1; t <= t_max; ++t) {
        x = step(map, x, eps(stream));
        out.moments[t].add(x);
        if (!admissible(map.kind(), x)) {
          ++out.escapes[t];
          break;
        }
      }
    }
  });

  EnsembleStats stats;
  stats.times = t_max;
  stats.n_traj = n_traj;
  std::vector<RunningMoments> total(t_max + 1);
  std::vector<std::size_t> escapes(t_max + 1, 0);
  for (const auto& block : blocks) {
    for (std::size_t t = 0; t <= t_max; ++t) {
      total[t].merge(block.moments[t]);
      escapes[t] += block.escapes[t];
    }
  }

  std::size_t escaped_so_far = 0;
  for (std::size_t t = 0; t <= t_max; ++t) {
    escaped_so_far += escapes[t];
    const auto& m = total[t];
    stats.mean.push_back(m.mean());
    stats.variance.push_back(m.variance());
    stats.se_mean.push_back(m.se_mean());
    stats.se_variance.push_back(m.se_variance());
    stats.count.push_back(m.count());
    stats.extinct_fraction.push_back(static_cast<double>(escaped_so_far) /
                                     static_cast<double>(n_traj));
  }
  return stats;
}

OneStepMoments one_step_moments(const MapSpec& map,
                                const InitialCondition& init,
                                const NoiseSpec& noise, std::size_t n,
                                std::uint64_t seed, ParallelOptions parallel) {
  // Escapes are only dropped after the step on which they happen, so step 1
  // of a one-step ensemble holds every X1.
  const EnsembleStats stats = run_ensemble(map, init, noise, 1, n, seed, parallel);
  return {stats.count[1], stats.mean[1], stats.variance[1], stats.se_mean[1],
          stats.se_variance[1]};
}

StationarityReport stationarity_check(MapKind map, double k, double var_eps,
                                      Branch branch, std::size_t n_traj,
                                      std::uint64_t seed, NoiseFamily family,
                                      double r_offset,
                                      ParallelOptions parallel) {
  const EquilibriumSolution sol = solve_equilibrium(map, k, var_eps);
  const BranchSolution& b = sol.branch(branch);
  if (b.degenerate) {
    throw DomainError(fmt::format(
        "{} branch at k={}, var_eps={} is degenerate (point mass at 0)",
        to_string(branch), k, var_eps));
  }
  const GammaParams population(k, b.theta);
  const MapSpec spec(map, b.r + r_offset);
  const OneStepMoments m = one_step_moments(
      spec, population, NoiseSpec(var_eps, family), n_traj, seed, parallel);

  StationarityReport report{map,
                            k,
                            var_eps,
                            branch,
                            spec.r(),
                            b.theta,
                            population.mean(),
                            population.variance(),
                            m,
                            (m.mean - population.mean()) / m.se_mean,
                            (m.variance - population.variance()) / m.se_variance,
                            false};
  report.pass = std::abs(report.mean_z) < kStationarityZLimit &&
                std::abs(report.var_z) < kStationarityZLimit;
  return report;
}

}  // namespace popchaos
