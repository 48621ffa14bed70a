#include <cmath>

#include "doctest.h"
#include "popchaos/equilibrium.hpp"
#include "popchaos/error.hpp"
#include "popchaos/running_moments.hpp"
#include "popchaos/simulate.hpp"

using namespace popchaos;

namespace {

double z_score(double estimate, double target, double se) {
  return (estimate - target) / se;
}

}  // namespace

TEST_CASE("noise_draw") {
  Stream stream(1);
  CHECK(noise_draw(NoiseSpec(0.0), stream) == 1.0);
  CHECK(noise_draw(NoiseSpec(0.0, NoiseFamily::lognormal), stream) == 1.0);

  for (const NoiseFamily family : {NoiseFamily::gamma, NoiseFamily::lognormal}) {
    CAPTURE(to_string(family));
    const NoiseSpec spec(0.1, family);
    Stream s(2024);
    RunningMoments m;
    for (int i = 0; i < 1'000'000; ++i) {
      const double eps = noise_draw(spec, s);
      REQUIRE(eps >= 0.0);
      m.add(eps);
    }
    CHECK(std::abs(z_score(m.mean(), 1.0, m.se_mean())) < 4.0);
    CHECK(std::abs(z_score(m.variance(), 0.1, m.se_variance())) < 5.0);
  }
}

TEST_CASE("step") {
  CHECK(step(MapSpec(MapKind::logistic, 2.0), 0.5, 1.0) == 0.5);
  CHECK(step(MapSpec(MapKind::logistic, 2.0), 0.5, 1.2) ==
        doctest::Approx(0.6).epsilon(1e-15));
  for (double r : {0.3, 1.5, 2.7, 4.2}) {
    CHECK(step(MapSpec(MapKind::ricker, r), 1.0, 1.0) == 1.0);
  }
  CHECK(step(MapSpec(MapKind::logistic, 2.0), 1.5, 1.0) < 0.0);
  CHECK_THROWS_AS(MapSpec(MapKind::ricker, 0.0), DomainError);
}

TEST_CASE("run_trajectory") {
  SUBCASE("deterministic logistic converges to 1 - 1/r") {
    Stream s(0);
    const auto traj =
        run_trajectory(MapSpec(MapKind::logistic, 2.5), 0.3, NoiseSpec(0.0), 200, s);
    REQUIRE(traj.values.size() == 201);
    CHECK_FALSE(traj.escaped());
    CHECK(std::abs(traj.values.back() - 0.6) < 1e-10);
  }
  SUBCASE("deterministic Ricker converges to 1") {
    Stream s(0);
    const auto traj =
        run_trajectory(MapSpec(MapKind::ricker, 1.5), 0.4, NoiseSpec(0.0), 200, s);
    CHECK(std::abs(traj.values.back() - 1.0) < 1e-10);
  }
  SUBCASE("same seed, same path") {
    const MapSpec map(MapKind::ricker, 2.3);
    Stream a(77, 3);
    Stream b(77, 3);
    const auto ta = run_trajectory(map, 0.8, NoiseSpec(0.2), 500, a);
    const auto tb = run_trajectory(map, 0.8, NoiseSpec(0.2), 500, b);
    CHECK(ta.values == tb.values);
  }
  SUBCASE("escape stops the path and keeps the offending value") {
    Stream s(5);
    // r near 4 with strong noise pushes the logistic state past 1
    const auto traj = run_trajectory(MapSpec(MapKind::logistic, 3.9), 0.5,
                                     NoiseSpec(0.5), 10000, s);
    REQUIRE(traj.escaped());
    CHECK(traj.values.size() == *traj.escape_step + 1);
    CHECK_FALSE(admissible(MapKind::logistic, traj.values.back()));
  }
  SUBCASE("bad arguments") {
    Stream s(0);
    CHECK_THROWS_AS(run_trajectory(MapSpec(MapKind::ricker, 1.0), -0.1,
                                   NoiseSpec(0.0), 10, s),
                    DomainError);
    CHECK_THROWS_AS(run_trajectory(MapSpec(MapKind::ricker, 1.0), 0.5,
                                   NoiseSpec(0.0), 0, s),
                    DomainError);
  }
}

TEST_CASE("run_ensemble without noise has zero variance") {
  const auto stats = run_ensemble(MapSpec(MapKind::logistic, 3.2), PointInit{0.3},
                                  NoiseSpec(0.0), 50, 100, 1);
  REQUIRE(stats.mean.size() == 51);
  REQUIRE(stats.se_variance.size() == 51);
  for (std::size_t t = 0; t <= 50; ++t) {
    CHECK(stats.variance[t] == 0.0);
    CHECK(stats.count[t] == 100);
  }
  CHECK(stats.extinct_fraction.back() == 0.0);
  CHECK_THROWS_AS(run_ensemble(MapSpec(MapKind::logistic, 3.2), PointInit{0.3},
                               NoiseSpec(0.0), 5, 1, 1),
                  DomainError);
}

TEST_CASE("run_ensemble from the logistic equilibrium keeps the mean") {
  const auto sol = logistic_solve(2.0, 0.1);
  const auto& plus = sol.branch(Branch::plus);
  const GammaParams p(2.0, plus.theta);
  const auto stats = run_ensemble(MapSpec(MapKind::logistic, plus.r), p,
                                  NoiseSpec(0.1), 1, 400000, 17);
  CHECK(std::abs(z_score(stats.mean[1], p.mean(), stats.se_mean[1])) < 4.0);
  CHECK(stats.se_mean[1] > 0.0);
}

TEST_CASE("run_ensemble is independent of the thread count") {
  const MapSpec map(MapKind::ricker, 2.6);
  const InitialCondition init = GammaParams(3.0, 0.3);
  const NoiseSpec noise(0.05);
  const auto one = run_ensemble(map, init, noise, 20, 100000, 42, {1});
  const auto four = run_ensemble(map, init, noise, 20, 100000, 42, {4});
  const auto seven = run_ensemble(map, init, noise, 20, 100000, 42, {7});
  CHECK(one == four);
  CHECK(one == seven);
  const auto other = run_ensemble(map, init, noise, 20, 100000, 43, {1});
  CHECK_FALSE(one == other);
}

TEST_CASE("one-step logistic mean is exact for gamma populations") {
  struct Case {
    double k, theta, r;
  };
  for (const Case c : {Case{2.0, 0.1, 2.5}, Case{0.5, 0.3, 1.8},
                       Case{10.0, 0.05, 3.5}, Case{1.0, 0.2, 2.0}}) {
    const GammaParams p(c.k, c.theta);
    const double exact =
        c.r * (p.mean() - c.k * (c.k + 1.0) * c.theta * c.theta);
    const auto m = one_step_moments(MapSpec(MapKind::logistic, c.r), p,
                                    NoiseSpec(0.05), 500000, 99);
    CAPTURE(c.k);
    CHECK(std::abs(z_score(m.mean, exact, m.se_mean)) < 4.0);
  }
}

TEST_CASE("one-step Ricker mean matches the Laplace-weighted moment") {
  for (const auto [k, theta, r] :
       {std::tuple{2.0, 0.4, 2.2}, std::tuple{0.7, 1.1, 1.3},
        std::tuple{25.0, 0.04, 3.0}}) {
    const GammaParams p(k, theta);
    const double exact = std::exp(r) * laplace_moment(p, MomentOrder(1), r);
    const auto m = one_step_moments(MapSpec(MapKind::ricker, r), p,
                                    NoiseSpec(0.1), 500000, 5);
    CAPTURE(k);
    CHECK(std::abs(z_score(m.mean, exact, m.se_mean)) < 4.0);
  }
}

TEST_CASE("one-step logistic mean needs only mean and variance") {
  const double r = 2.0;
  for (const InitialCondition& init :
       {InitialCondition{UniformInit{0.3, 0.7}},
        InitialCondition{LognormalInit{0.5, 0.01}},
        InitialCondition{PointInit{0.5}}}) {
    const double y = initial_mean(init);
    const double v = initial_variance(init);
    const double predicted = r * y * (1.0 - y) - r * v;
    const auto m = one_step_moments(MapSpec(MapKind::logistic, r), init,
                                    NoiseSpec(0.05), 400000, 8);
    CHECK(std::abs(z_score(m.mean, predicted, m.se_mean)) < 4.0);
  }
}

TEST_CASE("stationarity_check") {
  SUBCASE("logistic plus branch") {
    const auto rep =
        stationarity_check(MapKind::logistic, 2.0, 0.1, Branch::plus, 1'000'000, 1);
    CHECK(rep.pass);
    CHECK(rep.target_mean == doctest::Approx(2.0 * rep.theta));
  }
  SUBCASE("Ricker minus branch") {
    const auto rep =
        stationarity_check(MapKind::ricker, 1.0, 0.05, Branch::minus, 1'000'000, 2);
    CHECK(rep.pass);
  }
  SUBCASE("perturbed growth rate fails") {
    const auto rep = stationarity_check(MapKind::logistic, 2.0, 0.1, Branch::plus,
                                        1'000'000, 3, NoiseFamily::gamma, 0.2);
    CHECK_FALSE(rep.pass);
    CHECK(std::abs(rep.mean_z) > 4.0);
  }
  SUBCASE("errors propagate") {
    CHECK_THROWS_AS(stationarity_check(MapKind::logistic, 2.0, 0.3, Branch::plus,
                                       1000, 1),
                    InfeasibleError);
    CHECK_THROWS_AS(stationarity_check(MapKind::logistic, 2.0, 0.0, Branch::minus,
                                       1000, 1),
                    DomainError);
  }
}
