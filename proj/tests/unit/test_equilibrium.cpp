#include <cmath>
#include <vector>

#include "doctest.h"
#include "popchaos/equilibrium.hpp"
#include "popchaos/error.hpp"
#include "popchaos/gamma.hpp"

using namespace popchaos;

namespace {

// Reference values computed independently with mpmath at 40 digits
// (bisection on the residual, 200 halvings).
constexpr double kRickerRootK05 = 5.06981019077567;
constexpr double kRickerRootK1 = 3.65626718061604;
constexpr double kRickerRootK2 = 2.88727095035762;
constexpr double kRickerRootK100 = 2.0199339925366;
constexpr double kRickerK1V005Minus = 0.0506681301752785;
constexpr double kRickerK1V005Plus = 3.5222390853616;
constexpr double kLogisticK2V01Plus = 2.0431293675256;
constexpr double kLogisticK2V01Minus = 1.1568706324744;

std::vector<double> feasible_grid(double bound, int n) {
  std::vector<double> vs;
  for (int i = 0; i < n; ++i) vs.push_back(bound * i / (n - 1));
  return vs;
}

}  // namespace

TEST_CASE("NoiseSpec and parsing helpers") {
  CHECK(NoiseSpec(0.1).family() == NoiseFamily::gamma);
  CHECK_THROWS_AS(NoiseSpec(-0.1), DomainError);
  CHECK(parse_branch("plus") == Branch::plus);
  CHECK_FALSE(parse_branch("up").has_value());
  CHECK(parse_noise_family("lognormal") == NoiseFamily::lognormal);
  CHECK(parse_map_kind("ricker") == MapKind::ricker);
}

TEST_CASE("logistic_feasibility") {
  auto f = logistic_feasibility(2.0, 0.3);
  CHECK(f.bound == 0.25);
  CHECK_FALSE(f.feasible);

  f = logistic_feasibility(0.01, 0.4);
  CHECK(f.bound == doctest::Approx(1.0 / 2.01).epsilon(1e-15));
  CHECK(f.bound == doctest::Approx(0.4975).epsilon(1e-3));
  CHECK(f.feasible);

  CHECK(logistic_feasibility(2.0, 0.25).feasible);
  CHECK_THROWS_AS(logistic_feasibility(0.0, 0.1), DomainError);
  CHECK_THROWS_AS(logistic_feasibility(1.0, -0.1), DomainError);
}

TEST_CASE("logistic_solve examples") {
  SUBCASE("zero noise") {
    const auto sol = logistic_solve(1.0, 0.0);
    REQUIRE(sol.branches.size() == 2);
    CHECK(sol.branch(Branch::plus).r == 2.0);
    CHECK(sol.branch(Branch::minus).r == 1.0);
    CHECK(sol.branch(Branch::minus).degenerate);
    CHECK(sol.branch(Branch::minus).theta == 0.0);
    CHECK(sol.branch(Branch::plus).theta == doctest::Approx(0.25));
  }
  SUBCASE("k=2, v=0.1") {
    const auto sol = logistic_solve(2.0, 0.1);
    CHECK(sol.branch(Branch::plus).r ==
          doctest::Approx(kLogisticK2V01Plus).epsilon(1e-13));
    CHECK(sol.branch(Branch::minus).r ==
          doctest::Approx(kLogisticK2V01Minus).epsilon(1e-13));
    for (const auto& b : sol.branches) {
      CHECK(std::abs(logistic_quadratic_residual(b.r, 2.0, 0.1)) < 1e-12);
    }
  }
  SUBCASE("boundary gives a double root") {
    const auto sol = logistic_solve(2.0, 0.25);
    CHECK(sol.branch(Branch::plus).r == doctest::Approx(1.6).epsilon(1e-15));
    CHECK(sol.branch(Branch::minus).r == doctest::Approx(1.6).epsilon(1e-15));
  }
  SUBCASE("infeasible input reports the bound") {
    try {
      logistic_solve(2.0, 0.3);
      FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
      CHECK(e.bound() == 0.25);
    }
  }
}

TEST_CASE("logistic_quadratic_residual") {
  for (double k : {0.01, 0.5, 1.0, 7.0, 100.0}) {
    CHECK(logistic_quadratic_residual(1.0, k, 0.0) == doctest::Approx(0.0));
  }
  CHECK(logistic_quadratic_residual(2.0, 1.0, 0.0) == 0.0);
}

TEST_CASE("logistic branches over the feasibility grid") {
  for (double k : {0.01, 1.0, 2.0, 10.0, 100.0}) {
    const double bound = logistic_feasibility(k, 0.0).bound;
    for (double v : feasible_grid(bound, 20)) {
      CAPTURE(k);
      CAPTURE(v);
      const auto sol = logistic_solve(k, v);
      const double rp = sol.branch(Branch::plus).r;
      const double rm = sol.branch(Branch::minus).r;
      CHECK(std::abs(logistic_quadratic_residual(rp, k, v)) < 1e-10);
      CHECK(std::abs(logistic_quadratic_residual(rm, k, v)) < 1e-10);
      CHECK(rm >= 1.0);
      CHECK(rm <= rp);
      CHECK(rp <= (3.0 * k + 5.0) / (k + 3.0) + 1e-15);
      CHECK(rp < 3.0);

      // mean stationarity mu (1 - r) = -r E[X^2] with theta from the mean
      // condition
      for (const auto& b : sol.branches) {
        if (b.degenerate) continue;
        const GammaParams p(k, b.theta);
        const double lhs = p.mean() * (1.0 - b.r);
        const double rhs = -b.r * raw_moment(p, MomentOrder(2));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
      }
    }
  }
}

TEST_CASE("logistic zero noise reproduces (3k+5)/(k+3) and r = 1") {
  for (double k : {0.01, 0.5, 1.0, 4.0, 100.0}) {
    const auto sol = logistic_solve(k, 0.0);
    CHECK(sol.branch(Branch::plus).r ==
          doctest::Approx((3.0 * k + 5.0) / (k + 3.0)).epsilon(1e-15));
    CHECK(sol.branch(Branch::minus).r == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("ricker_residual examples") {
  for (double k : {0.01, 1.0, 100.0}) CHECK(ricker_residual(0.0, k, 0.0) == 0.0);
  CHECK(ricker_residual(0.0, 1.0, 0.1) ==
        doctest::Approx(-0.0322801154563672).epsilon(1e-12));
  CHECK(ricker_residual(3.0, 1.0, 0.0) ==
        doctest::Approx(0.574322041745479).epsilon(1e-12));
}

TEST_CASE("ricker_solve examples") {
  SUBCASE("k=1, zero noise") {
    const auto sol = ricker_solve(1.0, 0.0);
    REQUIRE(sol.branches.size() == 1);
    CHECK(sol.branches[0].label == Branch::plus);
    CHECK(sol.branches[0].r == doctest::Approx(kRickerRootK1).epsilon(1e-13));
    CHECK(std::abs(ricker_residual(sol.branches[0].r, 1.0, 0.0)) < 1e-10);
    CHECK_FALSE(sol.roots_beyond_r_max);
  }
  SUBCASE("k=100, zero noise") {
    const auto sol = ricker_solve(100.0, 0.0);
    REQUIRE(sol.branches.size() == 1);
    CHECK(sol.branches[0].r > 2.0);
    CHECK(sol.branches[0].r < 2.5);
    CHECK(sol.branches[0].r == doctest::Approx(kRickerRootK100).epsilon(1e-12));
  }
  SUBCASE("k=1, small noise: two branches straddling 2") {
    const auto sol = ricker_solve(1.0, 0.05);
    REQUIRE(sol.branches.size() == 2);
    const double rp = sol.branch(Branch::plus).r;
    const double rm = sol.branch(Branch::minus).r;
    CHECK(rm < 2.0);
    CHECK(rp > 2.0);
    CHECK(rp == doctest::Approx(kRickerK1V005Plus).epsilon(1e-12));
    CHECK(rm == doctest::Approx(kRickerK1V005Minus).epsilon(1e-12));
  }
  SUBCASE("other shapes at zero noise") {
    CHECK(ricker_solve(0.5, 0.0).branches[0].r ==
          doctest::Approx(kRickerRootK05).epsilon(1e-12));
    CHECK(ricker_solve(2.0, 0.0).branches[0].r ==
          doctest::Approx(kRickerRootK2).epsilon(1e-12));
  }
}

TEST_CASE("ricker_solve error paths") {
  // k = 0.01 has its only zero-noise root near r = 140.7
  CHECK_THROWS_AS(ricker_solve(0.01, 0.0), NumericalError);
  const auto wide = ricker_solve(0.01, 0.0, 200.0);
  REQUIRE(wide.branches.size() == 1);
  CHECK(wide.branches[0].r == doctest::Approx(140.715809125).epsilon(1e-10));

  // small noise: lower branch inside, upper branch beyond r_max
  const auto cut = ricker_solve(0.01, 0.05);
  CHECK(cut.roots_beyond_r_max);
  REQUIRE(cut.branches.size() == 1);
  CHECK(cut.branches[0].label == Branch::minus);

  try {
    ricker_solve(1.0, 0.7);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.bound() == doctest::Approx(0.6875).epsilon(1e-5));
  }
  CHECK_THROWS_AS(ricker_solve(-1.0, 0.0), DomainError);
  CHECK_THROWS_AS(ricker_solve(1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("ricker_variance_bound") {
  // mpmath: bisection on the residual peak at 50 digits
  CHECK(ricker_variance_bound(1.0) == doctest::Approx(0.6875).epsilon(1e-10));
  CHECK(std::abs(ricker_variance_bound(0.5) - 1.07043331249981) < 1e-10);
  CHECK(std::abs(ricker_variance_bound(2.0) - 0.404663923182442) < 1e-10);
  CHECK(std::abs(ricker_variance_bound(10.0) - 0.0953070400466658) < 1e-10);
  CHECK(std::abs(ricker_variance_bound(100.0) - 0.00995033044874102) < 1e-10);

  // just below / above the bound
  const double bound = ricker_variance_bound(2.0, 1e-10);
  CHECK(ricker_solve(2.0, bound - 1e-6).feasible);
  CHECK_THROWS_AS(ricker_solve(2.0, bound + 1e-6), InfeasibleError);
}

TEST_CASE("ricker_theta") {
  CHECK(ricker_theta(1e-9, 3.0) == doctest::Approx(0.25).epsilon(1e-8));
  CHECK_THROWS_AS(ricker_theta(0.0, 1.0), DomainError);

  const double r = kRickerRootK1;
  const double theta = ricker_theta(r, 1.0);
  CHECK(theta == doctest::Approx(std::expm1(r / 2.0) / r).epsilon(1e-15));

  // mean stationarity through the Laplace-weighted moment:
  // e^r E[X e^(-rX)] = k theta
  const GammaParams p(1.0, theta);
  CHECK(std::exp(r) * laplace_moment(p, MomentOrder(1), r) / p.mean() ==
        doctest::Approx(1.0).epsilon(1e-10));

  for (double k : {0.3, 1.0, 5.0}) {
    for (double rr : {0.1, 1.0, 3.0}) {
      const double t = ricker_theta(rr, k);
      CHECK(2.0 * (1.0 + rr * t) - (1.0 + 2.0 * rr * t) ==
            doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("ricker theta reconstruction re-derives the residual equation") {
  // Under X ~ Gamma(k, theta) the Ricker step gives
  //   E[X1]   = e^r k theta / (1 + r theta)^(k+1)
  //   E[X1^2] = (1+v) e^(2r) k (k+1) theta^2 / (1 + 2 r theta)^(k+2).
  // Stationarity of both moments must hold at every solved root.
  for (double k : {0.5, 1.0, 2.0, 10.0, 100.0}) {
    for (double v : {0.0, 0.001, 0.005}) {
      const auto sol = ricker_solve(k, v);
      for (const auto& b : sol.branches) {
        CAPTURE(k);
        CAPTURE(v);
        CAPTURE(b.r);
        const GammaParams p(k, b.theta);
        const double mean1 =
            std::exp(b.r) * laplace_moment(p, MomentOrder(1), b.r);
        const double second1 = (1.0 + v) * std::exp(2.0 * b.r) *
                               laplace_moment(p, MomentOrder(2), 2.0 * b.r);
        CHECK(mean1 / p.mean() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(second1 / raw_moment(p, MomentOrder(2)) ==
              doctest::Approx(1.0).epsilon(1e-10));

        CHECK(1.0 + b.r * b.theta ==
              doctest::Approx(std::exp(b.r / (k + 1.0))).epsilon(1e-10));
        CHECK(std::pow(1.0 + 2.0 * b.r * b.theta, k + 2.0) ==
              doctest::Approx((1.0 + v) * std::exp(2.0 * b.r)).epsilon(1e-10));
        CHECK(std::abs(ricker_residual(b.r, k, v)) < 1e-10);
      }
    }
  }
}

TEST_CASE("ricker zero-noise curve decreases in k and stays above 2") {
  double previous = 1e300;
  for (double k : {0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0}) {
    const auto sol = ricker_solve(k, 0.0);
    REQUIRE(sol.branches.size() == 1);
    const double r = sol.branches[0].r;
    CHECK(r > 2.0);
    CHECK(r < previous);
    previous = r;
  }
}

TEST_CASE("solution invariants") {
  const auto sol = ricker_solve(2.0, 0.1);
  REQUIRE(sol.branches.size() == 2);
  CHECK(sol.branches[0].r > sol.branches[1].r);
  CHECK(sol.branches[0].label == Branch::plus);
  for (const auto& b : sol.branches) CHECK(b.theta > 0.0);
  CHECK(sol.has_branch(Branch::minus));
  CHECK_FALSE(ricker_solve(2.0, 0.0).has_branch(Branch::minus));
  CHECK_THROWS_AS(ricker_solve(2.0, 0.0).branch(Branch::minus), DomainError);
}
