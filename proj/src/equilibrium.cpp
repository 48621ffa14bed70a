#include "popchaos/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "popchaos/error.hpp"

namespace popchaos {

namespace {

void require_shape(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw DomainError(fmt::format("shape k must be positive, got {}", k));
  }
}

void require_noise_variance(double var_eps) {
  if (!(var_eps >= 0.0) || !std::isfinite(var_eps)) {
    throw DomainError(
        fmt::format("noise variance must be >= 0, got {}", var_eps));
  }
}

// Bisection on a bracket [lo, hi] with f(lo), f(hi) of opposite sign, run
// until the midpoint is no longer representable between the endpoints.
template <typename F>
double bisect_to_precision(F&& f, double lo, double hi, double f_lo) {
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

// Maximum of the Ricker residual over r > 0. The residual is
// 2 e^(a r) - C e^(b r) - 1 with b > a, so its derivative vanishes once.
double ricker_residual_peak(double k, double var_eps) {
  const double a = 1.0 / (k + 1.0);
  const double b = 2.0 / (k + 2.0);
  const double log_c = std::log1p(var_eps) / (k + 2.0);
  const double r_star =
      (std::log((k + 2.0) / (k + 1.0)) - log_c) / (b - a);
  if (r_star <= 0.0) {
    return ricker_residual(0.0, k, var_eps);
  }
  return ricker_residual(r_star, k, var_eps);
}

}  // namespace

std::string_view to_string(NoiseFamily family) {
  return family == NoiseFamily::gamma ? "gamma" : "lognormal";
}

std::optional<NoiseFamily> parse_noise_family(std::string_view text) {
  if (text == "gamma") return NoiseFamily::gamma;
  if (text == "lognormal") return NoiseFamily::lognormal;
  return std::nullopt;
}

std::string_view to_string(Branch branch) {
  return branch == Branch::plus ? "plus" : "minus";
}

std::optional<Branch> parse_branch(std::string_view text) {
  if (text == "plus") return Branch::plus;
  if (text == "minus") return Branch::minus;
  return std::nullopt;
}

NoiseSpec::NoiseSpec(double variance, NoiseFamily family)
    : variance_(variance), family_(family) {
  require_noise_variance(variance);
}

const BranchSolution& EquilibriumSolution::branch(Branch label) const {
  for (const auto& b : branches) {
    if (b.label == label) return b;
  }
  throw DomainError(fmt::format("{} equilibrium at k={}, var_eps={} has no {} "
                                "branch",
                                to_string(map), k, var_eps, to_string(label)));
}

bool EquilibriumSolution::has_branch(Branch label) const {
  return std::any_of(branches.begin(), branches.end(),
                     [label](const auto& b) { return b.label == label; });
}

Feasibility logistic_feasibility(double k, double var_eps) {
  require_shape(k);
  require_noise_variance(var_eps);
  const double bound = std::min(1.0 / (k + 2.0), 0.5);
  return {var_eps <= bound, bound};
}

double logistic_quadratic_residual(double r, double k, double var_eps) {
  const double noise_term = var_eps / (var_eps + 1.0) * (k + 1.0) * (k + 1.0);
  return (k + 3.0) * r * r - (4.0 * k + 8.0) * r + (3.0 * k + 5.0 + noise_term);
}

EquilibriumSolution logistic_solve(double k, double var_eps) {
  const auto [feasible, bound] = logistic_feasibility(k, var_eps);
  if (!feasible) {
    throw InfeasibleError(
        fmt::format("logistic equilibrium infeasible: var_eps={} exceeds "
                    "bound {} for k={}",
                    var_eps, bound, k),
        bound);
  }

  // At the bound the radicand can round to a tiny negative number.
  const double radicand =
      std::max(0.0, (1.0 - var_eps * (k + 2.0)) / (var_eps + 1.0));
  const double spread = (k + 1.0) * std::sqrt(radicand);
  const double centre = 2.0 * k + 4.0;

  EquilibriumSolution sol{MapKind::logistic, k, var_eps, {}, true, bound};
  for (const Branch label : {Branch::plus, Branch::minus}) {
    const double sign = label == Branch::plus ? 1.0 : -1.0;
    const double r = (centre + sign * spread) / (k + 3.0);
    BranchSolution b{r, 0.0, label, false};
    if (r > 1.0) {
      b.theta = (r - 1.0) / (r * (1.0 + k));
    } else {
      b.degenerate = true;
    }
    sol.branches.push_back(b);
  }
  return sol;
}

double ricker_residual(double r, double k, double var_eps) {
  const double second = std::exp((std::log1p(var_eps) + 2.0 * r) / (k + 2.0));
  return 2.0 * std::exp(r / (k + 1.0)) - second - 1.0;
}

double ricker_theta(double r, double k) {
  if (!(r > 0.0)) {
    throw DomainError(fmt::format("ricker_theta needs r > 0, got {}", r));
  }
  require_shape(k);
  return std::expm1(r / (k + 1.0)) / r;
}

double ricker_variance_bound(double k, double tolerance) {
  require_shape(k);
  // (1+v)^(1/(k+2)) >= (k+2)/(k+1) moves the peak to r <= 0: no root.
  double hi = std::pow((k + 2.0) / (k + 1.0), k + 2.0) - 1.0;
  double lo = 0.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (ricker_residual_peak(k, mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

EquilibriumSolution ricker_solve(double k, double var_eps, double r_max) {
  require_shape(k);
  require_noise_variance(var_eps);
  if (!(r_max > kRickerScanStart) || !std::isfinite(r_max)) {
    throw DomainError(fmt::format("r_max must exceed {}, got {}",
                                  kRickerScanStart, r_max));
  }

  const double bound = ricker_variance_bound(k);
  auto f = [k, var_eps](double r) { return ricker_residual(r, k, var_eps); };

  std::vector<double> roots;
  const auto n_steps =
      static_cast<std::size_t>(std::ceil(r_max / kRickerScanStep));
  double r_prev = kRickerScanStart;
  double f_prev = f(r_prev);
  if (f_prev == 0.0) roots.push_back(r_prev);
  for (std::size_t i = 1; i <= n_steps; ++i) {
    const double r_next =
        std::min(static_cast<double>(i) * kRickerScanStep, r_max);
    if (r_next <= r_prev) continue;
    const double f_next = f(r_next);
    if (f_next == 0.0) {
      roots.push_back(r_next);
    } else if (f_prev != 0.0 && (f_prev < 0.0) != (f_next < 0.0)) {
      roots.push_back(bisect_to_precision(f, r_prev, r_next, f_prev));
    }
    r_prev = r_next;
    f_prev = f_next;
  }
  // The residual tends to -infinity, so a positive value at r_max means a
  // sign change still lies ahead.
  const bool beyond = f_prev > 0.0;

  if (roots.empty()) {
    if (beyond) {
      throw NumericalError(fmt::format(
          "no Ricker root in (0, {}] for k={}, var_eps={}; the residual is "
          "still positive at r_max so roots exist beyond it",
          r_max, k, var_eps));
    }
    throw InfeasibleError(
        fmt::format("Ricker equilibrium infeasible: no root in (0, {}] for "
                    "k={}, var_eps={} (variance bound {})",
                    r_max, k, var_eps, bound),
        bound);
  }

  std::sort(roots.begin(), roots.end(), std::greater<>());
  EquilibriumSolution sol{MapKind::ricker, k, var_eps, {}, true, bound, beyond};
  for (std::size_t i = 0; i < roots.size(); ++i) {
    // A lone root is the upper branch unless the upper one was cut off at
    // r_max.
    Branch label = i == 0 ? Branch::plus : Branch::minus;
    if (roots.size() == 1 && beyond) label = Branch::minus;
    sol.branches.push_back({roots[i], ricker_theta(roots[i], k), label, false});
  }
  return sol;
}

EquilibriumSolution solve_equilibrium(MapKind map, double k, double var_eps,
                                      double r_max) {
  return map == MapKind::logistic ? logistic_solve(k, var_eps)
                                  : ricker_solve(k, var_eps, r_max);
}

}  // namespace popchaos
