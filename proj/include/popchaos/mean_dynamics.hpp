#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "popchaos/maps.hpp"
#include "popchaos/parallel.hpp"

namespace popchaos {

/// Mean and variance of the population at one time step.
class MeanState {
 public:
  MeanState(double y, double var_x);

  double y() const noexcept { return y_; }
  double var_x() const noexcept { return var_x_; }

 private:
  double y_;
  double var_x_;
};

/// Exact one-step mean of the stochastic logistic map for any population
/// distribution with the given mean and variance:
///   y' = r y (1 - y) - r Var(X).
double logistic_mean_update(double r, const MeanState& state);

enum class ExpansionOrder { leading, corrected };

/// One-step mean of the stochastic Ricker map from the expansion of
/// e^(-r beta) about the mean:
///   leading:   y e^(r(1-y))
///   corrected: y e^(r(1-y)) + e^(r(1-y)) (r^2 y / 2 - r) Var(X)
/// The neglected terms are O(Var^(3/2)) + O(Var^2).
double ricker_mean_update(double r, const MeanState& state,
                          ExpansionOrder order);

struct ConvergenceOptions {
  std::optional<double> y0;  // default: 0.5 logistic, 0.7 Ricker
  double noise_scale = 1.0;  // noise variance = noise_scale * level
  std::size_t n_traj = 200000;
  std::uint64_t seed = 20250101;
  ParallelOptions parallel;
};

struct ConvergenceRecord {
  double level;
  double max_deviation;
};

/// For each level of a strictly decreasing variance ladder, runs an ensemble
/// started from Gamma with mean y0 and variance `level`, perturbed by noise
/// of variance noise_scale * level, and reports max_t |ensemble mean -
/// deterministic orbit| over t <= t_max. A zero level is exact: point start,
/// no noise, deviation 0.
std::vector<ConvergenceRecord> convergence_sweep(
    MapKind kind, double r, std::span<const double> ladder, std::size_t t_max,
    const ConvergenceOptions& options = {});

}  // namespace popchaos
