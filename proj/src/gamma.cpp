#include "popchaos/gamma.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <fmt/core.h>

#include "popchaos/error.hpp"

namespace popchaos {

namespace {

// Below this order the rising-factorial sum is both cheaper and more accurate
// than a difference of lgamma values.
constexpr unsigned kRisingFactorialMaxOrder = 64;

double checked_exp(double log_value, const char* what) {
  if (log_value > std::log(std::numeric_limits<double>::max())) {
    throw NumericalError(
        fmt::format("{} overflows double (log value {:.6g})", what, log_value));
  }
  return std::exp(log_value);
}

}  // namespace

GammaParams::GammaParams(double k, double theta) : k_(k), theta_(theta) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw DomainError(fmt::format("gamma shape k must be positive, got {}", k));
  }
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError(
        fmt::format("gamma scale theta must be positive, got {}", theta));
  }
}

GammaParams GammaParams::fit_from_moments(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0)) {
    throw DomainError(fmt::format(
        "moment fit needs positive mean and variance, got {} and {}", mean,
        variance));
  }
  return GammaParams(mean * mean / variance, variance / mean);
}

MomentOrder::MomentOrder(int n) {
  if (n < 0) {
    throw DomainError(fmt::format("moment order must be >= 0, got {}", n));
  }
  n_ = static_cast<unsigned>(n);
}

double gamma_pdf(double x, const GammaParams& p) {
  if (!(x > 0.0)) {
    throw DomainError(fmt::format("gamma_pdf needs x > 0, got {}", x));
  }
  const double k = p.k();
  const double log_density = (k - 1.0) * std::log(x) - x / p.theta() -
                             std::lgamma(k) - k * std::log(p.theta());
  return std::exp(log_density);
}

double log_gamma_ratio(double k, unsigned n) {
  if (n <= kRisingFactorialMaxOrder) {
    double sum = 0.0;
    for (unsigned i = 0; i < n; ++i) {
      sum += std::log(k + i);
    }
    return sum;
  }
  return std::lgamma(k + n) - std::lgamma(k);
}

double raw_moment(const GammaParams& p, MomentOrder n) {
  return laplace_moment(p, n, 0.0);
}

double laplace_moment(const GammaParams& p, MomentOrder n, double s) {
  if (!(s >= 0.0)) {
    throw DomainError(fmt::format("laplace_moment needs s >= 0, got {}", s));
  }
  const double order = n.value();
  const double log_value = log_gamma_ratio(p.k(), n.value()) +
                           order * std::log(p.theta()) -
                           (p.k() + order) * std::log1p(s * p.theta());
  return checked_exp(log_value, "gamma moment");
}

double central_moment3(const GammaParams& p) {
  const double t = p.theta();
  return 2.0 * p.k() * t * t * t;
}

double central_moment4(const GammaParams& p) {
  const double k = p.k();
  const double t2 = p.theta() * p.theta();
  return (3.0 + 6.0 / k) * k * k * t2 * t2;
}

double sample_one(const GammaParams& p, Stream& stream) {
  std::gamma_distribution<double> dist(p.k(), p.theta());
  return dist(stream);
}

std::vector<double> sample(const GammaParams& p, Stream& stream,
                           std::size_t count) {
  std::gamma_distribution<double> dist(p.k(), p.theta());
  std::vector<double> out(count);
  for (auto& x : out) {
    x = dist(stream);
  }
  return out;
}

}  // namespace popchaos
