#pragma once

#include <cstddef>
#include <vector>

#include "popchaos/rng.hpp"

namespace popchaos {

/// Shape/scale parametrisation of the gamma distribution used for the
/// equilibrium population. Construction rejects k <= 0 or theta <= 0.
class GammaParams {
 public:
  GammaParams(double k, double theta);

  /// Moment-matched parameters: k = mean^2/variance, theta = variance/mean.
  static GammaParams fit_from_moments(double mean, double variance);

  double k() const noexcept { return k_; }
  double theta() const noexcept { return theta_; }
  double mean() const noexcept { return k_ * theta_; }
  double variance() const noexcept { return k_ * theta_ * theta_; }

  friend bool operator==(const GammaParams&, const GammaParams&) = default;

 private:
  double k_;
  double theta_;
};

/// Order n >= 0 of a moment.
class MomentOrder {
 public:
  explicit MomentOrder(int n);
  unsigned value() const noexcept { return n_; }

 private:
  unsigned n_;
};

/// Density x^(k-1) e^(-x/theta) / (Gamma(k) theta^k), evaluated in log space.
/// Throws DomainError for x <= 0.
double gamma_pdf(double x, const GammaParams& p);

/// log of Gamma(k+n)/Gamma(k). Integer orders use the rising factorial
/// sum_{i<n} ln(k+i), which keeps full relative precision for large k where
/// the difference of two lgamma values cancels badly.
double log_gamma_ratio(double k, unsigned n);

/// E[X^n] = theta^n Gamma(k+n)/Gamma(k). Throws NumericalError on overflow.
double raw_moment(const GammaParams& p, MomentOrder n);

/// E[X^n e^(-sX)] = Gamma(k+n)/Gamma(k) theta^n / (1 + s theta)^(k+n).
/// Reduces to raw_moment at s = 0. Throws DomainError for s < 0.
double laplace_moment(const GammaParams& p, MomentOrder n, double s);

/// E[(X - k theta)^3] = 2 k theta^3.
double central_moment3(const GammaParams& p);

/// E[(X - k theta)^4] = (3 + 6/k) k^2 theta^4.
double central_moment4(const GammaParams& p);

/// One gamma variate, valid for every k > 0. Backed by
/// std::gamma_distribution (libstdc++: Marsaglia-Tsang, with the
/// Gamma(k+1) * U^(1/k) boost for k < 1).
double sample_one(const GammaParams& p, Stream& stream);

/// `count` independent variates, deterministic in the stream state.
std::vector<double> sample(const GammaParams& p, Stream& stream,
                           std::size_t count);

}  // namespace popchaos
