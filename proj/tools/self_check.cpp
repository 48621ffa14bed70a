#include "self_check.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "popchaos/chaos.hpp"
#include "popchaos/equilibrium.hpp"
#include "popchaos/gamma.hpp"
#include "popchaos/mean_dynamics.hpp"
#include "popchaos/simulate.hpp"

namespace popchaos::cli {
namespace {

constexpr double kShapes[] = {0.3, 1.0, 2.0, 10.0, 100.0};
constexpr double kScales[] = {0.1, 1.0, 3.0};

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

CheckResult moment_recurrences() {
  double worst = 0.0;
  for (double k : kShapes) {
    for (double theta : kScales) {
      const GammaParams p(k, theta);
      for (double s : {0.0, 0.5, 2.0}) {
        for (int n = 0; n < 4; ++n) {
          const double lhs = laplace_moment(p, MomentOrder(n + 1), s);
          const double rhs = (k + n) * theta / (1.0 + s * theta) *
                             laplace_moment(p, MomentOrder(n), s);
          worst = std::max(worst, rel_err(lhs, rhs));
        }
      }
    }
  }
  return {"gamma moment recurrences", worst < 1e-12,
          fmt::format("max relative error {:.3g}", worst)};
}

CheckResult central_moments() {
  double worst = 0.0;
  for (double k : kShapes) {
    if (k > 10.0) continue;  // raw expansion cancels badly beyond this
    for (double theta : kScales) {
      const GammaParams p(k, theta);
      double m[5];
      for (int n = 0; n <= 4; ++n) m[n] = raw_moment(p, MomentOrder(n));
      const double c3 = m[3] - 3 * m[1] * m[2] + 2 * m[1] * m[1] * m[1];
      const double c4 = m[4] - 4 * m[1] * m[3] + 6 * m[1] * m[1] * m[2] -
                        3 * m[1] * m[1] * m[1] * m[1];
      worst = std::max({worst, rel_err(c3, central_moment3(p)),
                        rel_err(c4, central_moment4(p))});
    }
  }
  return {"gamma central moments", worst < 1e-10,
          fmt::format("max relative error {:.3g}", worst)};
}

CheckResult logistic_grid() {
  double worst = 0.0;
  bool ordered = true;
  for (double k : {0.01, 1.0, 2.0, 10.0, 100.0}) {
    const double bound = logistic_feasibility(k, 0.0).bound;
    const double cap = (3.0 * k + 5.0) / (k + 3.0);
    for (int i = 0; i < 20; ++i) {
      const double v = bound * i / 19.0;
      const auto sol = logistic_solve(k, v);
      const double rp = sol.branch(Branch::plus).r;
      const double rm = sol.branch(Branch::minus).r;
      worst = std::max({worst, std::abs(logistic_quadratic_residual(rp, k, v)),
                        std::abs(logistic_quadratic_residual(rm, k, v))});
      ordered = ordered && rm >= 1.0 - 1e-12 && rm <= rp && rp <= cap + 1e-12 &&
                cap < 3.0;
    }
  }
  return {"logistic branches", worst < 1e-10 && ordered,
          fmt::format("max residual {:.3g}, 1 <= r- <= r+ < 3: {}", worst,
                      ordered ? "yes" : "no")};
}

CheckResult ricker_grid() {
  double worst = 0.0;
  std::size_t roots = 0;
  for (double k : {0.5, 1.0, 2.0, 10.0, 100.0}) {
    const double bound = ricker_variance_bound(k);
    for (int i = 0; i < 10; ++i) {
      const double v = 0.9 * bound * i / 9.0;
      for (const auto& b : ricker_solve(k, v).branches) {
        worst = std::max(worst, std::abs(ricker_residual(b.r, k, v)));
        ++roots;
      }
    }
  }
  return {"Ricker residuals", worst < 1e-10,
          fmt::format("{} roots, max residual {:.3g}", roots, worst)};
}

CheckResult ricker_curve() {
  bool decreasing = true;
  double previous = INFINITY;
  double lowest = INFINITY;
  for (int i = 0; i < 20; ++i) {
    const double k = 0.5 * std::pow(200.0, i / 19.0);
    const double r = ricker_solve(k, 0.0).branches.front().r;
    decreasing = decreasing && r < previous;
    previous = r;
    lowest = std::min(lowest, r);
  }
  return {"Ricker r(k) without noise", decreasing && lowest > 2.0,
          fmt::format("decreasing: {}, smallest r {:.6f}", decreasing ? "yes" : "no",
                      lowest)};
}

CheckResult stationarity(const SelfCheckOptions& o) {
  const auto a = stationarity_check(MapKind::logistic, 2.0, 0.1, Branch::plus,
                                    o.n_traj, o.seed, NoiseFamily::gamma, 0.0,
                                    {o.threads});
  const auto b = stationarity_check(MapKind::ricker, 1.0, 0.05, Branch::minus,
                                    o.n_traj, o.seed + 1, NoiseFamily::gamma, 0.0,
                                    {o.threads});
  const auto control = stationarity_check(MapKind::logistic, 2.0, 0.1, Branch::plus,
                                          o.n_traj, o.seed + 2, NoiseFamily::gamma,
                                          0.2, {o.threads});
  const bool ok = a.pass && b.pass && !control.pass;
  return {"stationarity z-tests", ok,
          fmt::format("logistic z ({:.2f}, {:.2f}), Ricker z ({:.2f}, {:.2f}), "
                      "perturbed r mean z {:.2f}",
                      a.mean_z, a.var_z, b.mean_z, b.var_z, control.mean_z)};
}

CheckResult logistic_mean(const SelfCheckOptions& o) {
  const UniformInit init{0.3, 0.7};
  const double r = 2.0;
  const MeanState state(initial_mean(init), initial_variance(init));
  const double predicted = logistic_mean_update(r, state);
  const auto m = one_step_moments(MapSpec(MapKind::logistic, r), init,
                                  NoiseSpec(0.05), o.n_traj, o.seed + 3, {o.threads});
  const double z = (m.mean - predicted) / m.se_mean;
  return {"logistic mean update", std::abs(z) < 4.0,
          fmt::format("uniform start, z {:.2f}", z)};
}

CheckResult ricker_order() {
  const double levels[] = {1e-2, 1e-3, 1e-4, 1e-5};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double r = 1.5;
  for (double v : levels) {
    const GammaParams p = GammaParams::fit_from_moments(1.0, v);
    const double exact = std::exp(r) * laplace_moment(p, MomentOrder(1), r);
    const double approx =
        ricker_mean_update(r, MeanState(1.0, v), ExpansionOrder::corrected);
    const double x = std::log(v);
    const double y = std::log(std::abs(approx - exact));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  return {"Ricker corrected update order", slope >= 1.3,
          fmt::format("log-log slope {:.3f}", slope)};
}

CheckResult chaos_oracles() {
  const double ln2 = lyapunov(MapKind::logistic, 4.0, 0.3).value;
  const double fixed_l = lyapunov(MapKind::logistic, 2.5, 0.5).value;
  const double fixed_r = lyapunov(MapKind::ricker, 1.5, 0.7).value;
  const bool ok = std::abs(ln2 - std::numbers::ln2) < 1e-3 &&
                  std::abs(fixed_l - std::log(0.5)) < 1e-6 &&
                  std::abs(fixed_r - std::log(0.5)) < 1e-6;
  return {"lyapunov oracles", ok,
          fmt::format("logistic r=4: {:.6f}, fixed points: {:.9f}, {:.9f}", ln2,
                      fixed_l, fixed_r)};
}

CheckResult transitions() {
  const bool ricker = transition_report(MapKind::ricker, 0.5, 0.0).transition_found &&
                      transition_report(MapKind::ricker, 1.0, 0.0).transition_found;
  const bool logistic =
      !transition_report(MapKind::logistic, 10.0, 0.05).transition_found &&
      !transition_report(MapKind::logistic, 0.01, 0.0).transition_found;
  return {"transition verdicts", ricker && logistic,
          fmt::format("Ricker k in {{0.5, 1}} chaotic: {}, logistic steady: {}",
                      ricker ? "yes" : "no", logistic ? "yes" : "no")};
}

}  // namespace

std::vector<CheckResult> self_check(const SelfCheckOptions& options) {
  return {moment_recurrences(), central_moments(), logistic_grid(),
          ricker_grid(),        ricker_curve(),    stationarity(options),
          logistic_mean(options), ricker_order(), chaos_oracles(),
          transitions()};
}

}  // namespace popchaos::cli
