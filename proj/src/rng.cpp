#include "popchaos/rng.hpp"

namespace popchaos {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t index) {
  // Hash the index first so neighbouring (seed, index) pairs land far apart
  // in SplitMix64's sequence.
  std::uint64_t key = index;
  std::uint64_t state = seed ^ splitmix64(key);
  for (auto& word : s_) {
    word = splitmix64(state);
  }
}

Stream::result_type Stream::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Stream::uniform01() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

}  // namespace popchaos
