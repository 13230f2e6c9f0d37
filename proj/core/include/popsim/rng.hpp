#pragma once

#include <cstdint>
#include <random>

namespace popsim {

/// Seeded generator used by every stochastic routine in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Bounded integers and unit reals are derived from raw 64-bit
/// outputs by the routines below rather than by <random> distributions,
/// whose algorithms are implementation-defined. Together this makes every
/// trace reproducible across compilers and standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). Unbiased (Lemire's multiply-shift with
  /// rejection of the short tail). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform real in the open interval (0, 1), 53 bits of resolution.
  double uniform_open01();

  // UniformRandomBitGenerator interface, for std::shuffle and friends.
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return next(); }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer. Bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of trial `index` in a sweep started from `seed_base`. Any single
/// trial can be re-run in isolation from (seed_base, index).
constexpr std::uint64_t trial_seed(std::uint64_t seed_base, std::uint64_t index) {
  return mix64(seed_base ^ mix64(index));
}

}  // namespace popsim
