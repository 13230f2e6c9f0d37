#include "popsim/rng.hpp"

#include "popsim/errors.hpp"

namespace popsim {

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw UsageError("uniform_below: bound must be positive");
  __extension__ using u128 = unsigned __int128;
  u128 m = static_cast<u128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t floor = (0 - bound) % bound;
    while (low < floor) {
      m = static_cast<u128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::uniform_open01() {
  // Midpoints of the 2^53 equal cells of [0,1): never 0, never 1.
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(next() >> 11) + 0.5) * kScale;
}

}  // namespace popsim
