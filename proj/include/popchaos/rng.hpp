#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace popchaos {

// xoshiro256** engine. Satisfies UniformRandomBitGenerator so it can drive
// the <random> distributions.
//
// Independent streams are keyed by (seed, index) through SplitMix64, so the
// stream for trajectory i never depends on how many other streams exist or
// which thread builds it.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed, std::uint64_t index = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform double on [0, 1) with 53 random bits.
  double uniform01();

  friend bool operator==(const Stream&, const Stream&) = default;

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace popchaos
