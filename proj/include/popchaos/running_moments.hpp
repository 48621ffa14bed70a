#pragma once

#include <cstddef>

namespace popchaos {

// Streaming central moments up to fourth order (Terriberry update, Pebay
// merge). Merging accumulators in a fixed order is deterministic, which is
// what the ensemble reductions rely on.
class RunningMoments {
 public:
  void add(double x);
  void merge(const RunningMoments& other);

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  // Unbiased sample variance; NaN for fewer than two observations.
  double variance() const;
  // Biased central moments M_p / n.
  double central3() const;
  double central4() const;
  double se_mean() const;
  // Standard error of the sample variance from the fourth central moment:
  // sqrt((m4 - s^4 (n-3)/(n-1)) / n).
  double se_variance() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

}  // namespace popchaos
