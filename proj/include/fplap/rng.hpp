#pragma once

#include <cstdint>
#include <random>

namespace fplap {

/// splitmix64 step; used to derive independent per-trial seeds from a root
/// seed so trials stay reproducible regardless of evaluation order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t s = root ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

/// mt19937_64 with an explicit bit mapping to doubles. The standard pins the
/// engine's output exactly but not the library distributions, so we map bits
/// ourselves to keep runs byte-reproducible.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  /// uniform in [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// uniform in [-1, 1)
  double symmetric() { return 2.0 * uniform() - 1.0; }

  /// integer in [0, n)
  std::uint64_t index(std::uint64_t n) { return eng_() % n; }

private:
  std::mt19937_64 eng_;
};

}
