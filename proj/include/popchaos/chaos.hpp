#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "popchaos/equilibrium.hpp"
#include "popchaos/maps.hpp"
#include "popchaos/parallel.hpp"

namespace popchaos {

inline constexpr std::size_t kLyapunovBurnIn = 1000;
inline constexpr std::size_t kLyapunovIters = 100000;
inline constexpr double kLambdaTolerance = 1e-3;
inline constexpr int kMaxPeriod = 64;
inline constexpr std::size_t kCycleTransient = 10000;
inline constexpr double kCycleTolerance = 1e-8;

/// Default starting points: away from the fixed points and from the
/// logistic pre-images of 0.
double default_x0(MapKind kind);
double fallback_x0(MapKind kind);

struct LyapunovEstimate {
  // Time average of ln|f'(x_t)|. -infinity when the orbit hit a point with
  // f'(x) == 0 exactly (superstable orbit).
  double value;
  bool superstable = false;
};

/// Largest Lyapunov exponent of the deterministic map along the orbit of x0.
/// Throws NumericalError if the orbit leaves the admissible region
/// (logistic [0, 1] minus the absorbing endpoints, Ricker (0, 1e6)) and
/// DomainError for iters < 1e4.
LyapunovEstimate lyapunov(MapKind kind, double r, double x0,
                          std::size_t burn_in = kLyapunovBurnIn,
                          std::size_t iters = kLyapunovIters);

enum class Regime { stable_fixed, periodic, chaotic, divergent, marginal };

std::string_view to_string(Regime regime);

struct RegimeReport {
  MapKind map;
  double r;
  LyapunovEstimate lyapunov;
  Regime regime;
  // Minimal cycle length when one closes within kMaxPeriod. A periodic
  // report without a period is an attracting cycle longer than kMaxPeriod.
  std::optional<int> period;
};

/// Chaotic if lambda > lambda_tol. Otherwise the minimal period p <= p_max is
/// found by cycle closure after a transient; p = 1 with lambda < -lambda_tol
/// is stable_fixed, p > 1 periodic, |lambda| <= lambda_tol marginal. An orbit
/// that escapes from both starting points is divergent.
RegimeReport classify(MapKind kind, double r,
                      double lambda_tol = kLambdaTolerance,
                      int p_max = kMaxPeriod);

struct BifurcationRecord {
  double r;
  std::vector<double> attractor;
  LyapunovEstimate lyapunov;
  bool diverged = false;
};

/// Uniform grid of n_r growth rates on [r_min, r_max]. For each: burn-in,
/// then samples_per_r attractor points and the Lyapunov exponent. Rows come
/// back in grid order regardless of thread count.
std::vector<BifurcationRecord> bifurcation_scan(MapKind kind, double r_min,
                                                double r_max, std::size_t n_r,
                                                std::size_t samples_per_r,
                                                ParallelOptions parallel = {});

struct BranchRegime {
  BranchSolution branch;
  RegimeReport regime;
};

struct TransitionReport {
  MapKind map;
  double k;
  double var_eps;
  std::vector<BranchRegime> branches;
  bool transition_found;  // some branch is chaotic
};

/// Solves the equilibrium branches and classifies each growth rate with the
/// deterministic map.
TransitionReport transition_report(MapKind kind, double k, double var_eps);

}  // namespace popchaos
