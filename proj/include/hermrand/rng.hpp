#pragma once

#include <cstdint>
#include <limits>

namespace hermrand {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: the state for (seed, index, lane) is a pure function
/// of the triple, so sample i draws the same numbers whichever worker runs it.
/// Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0)
      : state_(mix64(seed ^ 0x6a09e667f3bcc909ULL) ^ mix64(index * 0x9e3779b97f4a7c15ULL + mix64(lane + 0x3c6ef372fe94f82bULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() { return ((*this)() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

 private:
  std::uint64_t state_;
};

}  // namespace hermrand
