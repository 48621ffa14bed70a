#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "popchaos/equilibrium.hpp"
#include "popchaos/gamma.hpp"
#include "popchaos/maps.hpp"
#include "popchaos/parallel.hpp"
#include "popchaos/rng.hpp"

namespace popchaos {

/// Stochastic map X' = f_r(X) * eps with growth rate r > 0.
class MapSpec {
 public:
  MapSpec(MapKind kind, double r);

  MapKind kind() const noexcept { return kind_; }
  double r() const noexcept { return r_; }

 private:
  MapKind kind_;
  double r_;
};

/// Upper edge of the admissible Ricker state; larger values count as
/// divergence.
inline constexpr double kRickerStateCap = 1e6;

/// Admissible region: logistic (0, 1), Ricker (0, kRickerStateCap).
bool admissible(MapKind kind, double x);

/// One perturbation with mean 1 and the requested variance. Gamma family:
/// shape 1/v, scale v. Lognormal: log-mean -ln(1+v)/2, log-variance ln(1+v).
/// Zero variance returns exactly 1 without touching the stream.
double noise_draw(const NoiseSpec& spec, Stream& stream);

/// Logistic r x (1-x) eps or Ricker x e^(r(1-x)) eps. Negative logistic
/// outputs (x > 1) are returned as-is.
double step(const MapSpec& map, double x, double eps);

struct Trajectory {
  // values[0] = x0. When the state leaves the admissible region the
  // offending value is the last one recorded.
  std::vector<double> values;
  std::optional<std::size_t> escape_step;

  bool escaped() const noexcept { return escape_step.has_value(); }
};

Trajectory run_trajectory(const MapSpec& map, double x0, const NoiseSpec& noise,
                          std::size_t t_max, Stream& stream);

// Initial population distributions for ensembles.
struct PointInit {
  double x0;
};
struct UniformInit {
  double lo;
  double hi;
};
struct LognormalInit {
  double mean;
  double variance;
};
using InitialCondition =
    std::variant<PointInit, GammaParams, UniformInit, LognormalInit>;

double draw_initial(const InitialCondition& init, Stream& stream);
double initial_mean(const InitialCondition& init);
double initial_variance(const InitialCondition& init);

struct EnsembleStats {
  std::size_t times = 0;  // t_max; every vector has times + 1 entries
  std::size_t n_traj = 0;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> se_mean;
  std::vector<double> se_variance;
  // Trajectories contributing at step t (escaped ones drop out after their
  // escape step).
  std::vector<std::size_t> count;
  // Fraction of all trajectories that have escaped at or before step t.
  std::vector<double> extinct_fraction;

  friend bool operator==(const EnsembleStats&, const EnsembleStats&) = default;
};

/// Monte Carlo ensemble. Trajectory i draws from Stream(seed, i); blocks of
/// trajectories are reduced independently and merged in index order, so the
/// result is bit-identical for any thread count.
EnsembleStats run_ensemble(const MapSpec& map, const InitialCondition& init,
                           const NoiseSpec& noise, std::size_t t_max,
                           std::size_t n_traj, std::uint64_t seed,
                           ParallelOptions parallel = {});

/// Sample mean/variance of X1 = f_r(X0) eps over n draws of X0 ~ init, with
/// standard errors. Every draw counts, including logistic values that leave
/// (0, 1), since the moment identities are statements about all of X1.
struct OneStepMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double se_mean = 0.0;
  double se_variance = 0.0;
};

OneStepMoments one_step_moments(const MapSpec& map,
                                const InitialCondition& init,
                                const NoiseSpec& noise, std::size_t n,
                                std::uint64_t seed,
                                ParallelOptions parallel = {});

struct StationarityReport {
  MapKind map;
  double k;
  double var_eps;
  Branch branch;
  double r;
  double theta;
  double target_mean;      // k theta
  double target_variance;  // k theta^2
  OneStepMoments sample;
  double mean_z;
  double var_z;
  bool pass;  // |mean_z| < 4 and |var_z| < 4
};

inline constexpr double kStationarityZLimit = 4.0;

/// Draws X0 ~ Gamma(k, theta) at the equilibrium branch, applies one step
/// and z-tests the preserved mean and variance. `r_offset` shifts the growth
/// rate away from the equilibrium (negative controls).
StationarityReport stationarity_check(MapKind map, double k, double var_eps,
                                      Branch branch, std::size_t n_traj,
                                      std::uint64_t seed,
                                      NoiseFamily family = NoiseFamily::gamma,
                                      double r_offset = 0.0,
                                      ParallelOptions parallel = {});

}  // namespace popchaos
