#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "popchaos/maps.hpp"

namespace popchaos {

enum class NoiseFamily { gamma, lognormal };

std::string_view to_string(NoiseFamily family);
std::optional<NoiseFamily> parse_noise_family(std::string_view text);

/// Multiplicative perturbation with mean exactly 1. Only the variance is a
/// free parameter; the family fixes the shape of the distribution.
class NoiseSpec {
 public:
  explicit NoiseSpec(double variance, NoiseFamily family = NoiseFamily::gamma);

  double variance() const noexcept { return variance_; }
  NoiseFamily family() const noexcept { return family_; }

 private:
  double variance_;
  NoiseFamily family_;
};

enum class Branch { plus, minus };

std::string_view to_string(Branch branch);
std::optional<Branch> parse_branch(std::string_view text);

struct BranchSolution {
  double r;
  double theta;
  Branch label;
  // Logistic minus branch at zero noise: r = 1 and the population
  // distribution collapses to a point mass at 0 (theta reported as 0).
  bool degenerate = false;
};

struct EquilibriumSolution {
  MapKind map;
  double k;
  double var_eps;
  std::vector<BranchSolution> branches;  // descending in r
  bool feasible;
  double bound_var;
  // Ricker only: the residual is still positive at r_max, so at least one
  // further root lies beyond the scanned interval.
  bool roots_beyond_r_max = false;

  /// The branch carrying `label`; throws DomainError if absent.
  const BranchSolution& branch(Branch label) const;
  bool has_branch(Branch label) const;
};

struct Feasibility {
  bool feasible;
  double bound;
};

/// Real logistic roots exist iff var_eps <= min(1/(k+2), 0.5).
Feasibility logistic_feasibility(double k, double var_eps);

/// r_pm = [(2k+4) +- (k+1) sqrt((1 - v(k+2))/(v+1))] / (k+3), each with
/// theta = (r-1)/(r(1+k)). Throws InfeasibleError beyond the bound.
EquilibriumSolution logistic_solve(double k, double var_eps);

/// (k+3) r^2 - (4k+8) r + 3k+5 + v/(v+1) (k+1)^2; zero at both branches.
double logistic_quadratic_residual(double r, double k, double var_eps);

/// 2 e^(r/(k+1)) - ((1+v) e^(2r))^(1/(k+2)) - 1; the second term is evaluated
/// as exp((log1p(v) + 2r)/(k+2)).
double ricker_residual(double r, double k, double var_eps);

/// Scale of the Ricker equilibrium: mean stationarity of the Ricker step
/// under Gamma(k, theta) forces 1 + r theta = e^(r/(k+1)).
///
/// This is a reconstruction. Combined with variance stationarity,
/// (1 + 2 r theta)^(k+2) = (1+v) e^(2r), the identity
/// 2(1 + r theta) - (1 + 2 r theta) = 1 gives back ricker_residual = 0.
double ricker_theta(double r, double k);

/// Largest noise variance for which ricker_residual has a positive root.
/// The residual has a single interior maximum, so existence is decided
/// exactly at that maximum; the variance is bisected to `tolerance`.
double ricker_variance_bound(double k, double tolerance = 1e-12);

inline constexpr double kRickerDefaultRMax = 10.0;
inline constexpr double kRickerScanStep = 1e-3;
inline constexpr double kRickerScanStart = 1e-8;

/// Scans (1e-8, r_max] in steps of 1e-3, bisects every sign change to machine
/// precision. Throws InfeasibleError when var_eps exceeds the bound and
/// NumericalError when the only roots lie beyond r_max.
EquilibriumSolution ricker_solve(double k, double var_eps,
                                 double r_max = kRickerDefaultRMax);

/// Dispatch on map kind (r_max applies to Ricker only).
EquilibriumSolution solve_equilibrium(MapKind map, double k, double var_eps,
                                      double r_max = kRickerDefaultRMax);

}  // namespace popchaos
