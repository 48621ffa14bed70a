#include "popchaos/chaos.hpp"

#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "popchaos/error.hpp"
#include "popchaos/simulate.hpp"

namespace popchaos {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Deterministic orbits may sit on the logistic endpoints only on their way
// to the absorbing state 0, so both count as escape.
bool orbit_ok(MapKind kind, double x) {
  if (!std::isfinite(x)) return false;
  return admissible(kind, x);
}

double iterate(MapKind kind, double r, double x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    x = det_step(kind, r, x);
    if (!orbit_ok(kind, x)) {
      throw NumericalError(fmt::format(
          "{} orbit at r={} left the admissible region (x={})",
          to_string(kind), r, x));
    }
  }
  return x;
}

std::optional<int> detect_period(MapKind kind, double r, double x0,
                                 int p_max) {
  double x = iterate(kind, r, x0, kCycleTransient);
  std::vector<double> orbit(2 * static_cast<std::size_t>(p_max));
  for (auto& v : orbit) {
    v = x;
    x = iterate(kind, r, x, 1);
  }
  for (int p = 1; p <= p_max; ++p) {
    bool closed = true;
    for (int n = 0; n < p_max && closed; ++n) {
      closed = std::abs(orbit[n + p] - orbit[n]) < kCycleTolerance;
    }
    if (closed) return p;
  }
  return std::nullopt;
}

}  // namespace

double default_x0(MapKind kind) {
  return kind == MapKind::logistic ? 0.5 : 0.7;
}

double fallback_x0(MapKind kind) {
  return kind == MapKind::logistic ? 0.2345678 : 0.3456789;
}

LyapunovEstimate lyapunov(MapKind kind, double r, double x0,
                          std::size_t burn_in, std::size_t iters) {
  if (iters < 10000) {
    throw DomainError(
        fmt::format("lyapunov needs at least 1e4 iterations, got {}", iters));
  }
  if (!orbit_ok(kind, x0)) {
    throw NumericalError(fmt::format("{} start x0={} is outside the admissible "
                                     "region",
                                     to_string(kind), x0));
  }
  double x = iterate(kind, r, x0, burn_in);
  double sum = 0.0;
  for (std::size_t i = 0; i < iters; ++i) {
    const double slope = std::abs(det_derivative(kind, r, x));
    if (slope == 0.0) {
      return {-std::numeric_limits<double>::infinity(), true};
    }
    sum += std::log(slope);
    x = iterate(kind, r, x, 1);
  }
  return {sum / static_cast<double>(iters), false};
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::stable_fixed:
      return "stable_fixed";
    case Regime::periodic:
      return "periodic";
    case Regime::chaotic:
      return "chaotic";
    case Regime::divergent:
      return "divergent";
    case Regime::marginal:
      return "marginal";
  }
  return "unknown";
}

RegimeReport classify(MapKind kind, double r, double lambda_tol, int p_max) {
  RegimeReport report{kind, r, {kNaN, false}, Regime::divergent, std::nullopt};

  std::optional<double> start;
  for (const double x0 : {default_x0(kind), fallback_x0(kind)}) {
    try {
      report.lyapunov = lyapunov(kind, r, x0);
      start = x0;
      break;
    } catch (const NumericalError&) {
    }
  }
  if (!start) return report;

  const double lambda = report.lyapunov.value;
  if (lambda > lambda_tol) {
    report.regime = Regime::chaotic;
    return report;
  }

  try {
    report.period = detect_period(kind, r, *start, p_max);
  } catch (const NumericalError&) {
    report.regime = Regime::divergent;
    return report;
  }

  const bool contracting = lambda < -lambda_tol;
  if (!report.period) {
    report.regime = contracting ? Regime::periodic : Regime::marginal;
  } else if (*report.period == 1) {
    report.regime = contracting ? Regime::stable_fixed : Regime::marginal;
  } else {
    report.regime = Regime::periodic;
  }
  return report;
}

std::vector<BifurcationRecord> bifurcation_scan(MapKind kind, double r_min,
                                                double r_max, std::size_t n_r,
                                                std::size_t samples_per_r,
                                                ParallelOptions parallel) {
  if (!(r_min < r_max)) {
    throw DomainError(
        fmt::format("bifurcation scan needs r_min < r_max, got [{}, {}]",
                    r_min, r_max));
  }
  if (n_r < 2) {
    throw DomainError("bifurcation scan needs at least 2 grid points");
  }

  std::vector<BifurcationRecord> records(n_r);
  const double h = (r_max - r_min) / static_cast<double>(n_r - 1);
  parallel_for(n_r, parallel.threads, [&](std::size_t i) {
    BifurcationRecord& rec = records[i];
    rec.r = i + 1 == n_r ? r_max : r_min + static_cast<double>(i) * h;
    rec.lyapunov = {kNaN, false};
    for (const double x0 : {default_x0(kind), fallback_x0(kind)}) {
      try {
        rec.lyapunov = lyapunov(kind, rec.r, x0);
        double x = iterate(kind, rec.r, x0, kLyapunovBurnIn);
        rec.attractor.resize(samples_per_r);
        for (auto& sample : rec.attractor) {
          x = iterate(kind, rec.r, x, 1);
          sample = x;
        }
        rec.diverged = false;
        return;
      } catch (const NumericalError&) {
        rec.diverged = true;
        rec.attractor.clear();
      }
    }
  });
  return records;
}

TransitionReport transition_report(MapKind kind, double k, double var_eps) {
  const EquilibriumSolution sol = solve_equilibrium(kind, k, var_eps);
  TransitionReport report{kind, k, var_eps, {}, false};
  for (const auto& branch : sol.branches) {
    RegimeReport regime = classify(kind, branch.r);
    report.transition_found =
        report.transition_found || regime.regime == Regime::chaotic;
    report.branches.push_back({branch, regime});
  }
  return report;
}

}  // namespace popchaos
