#ifndef MCPAD_RNG_HPP
#define MCPAD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace mcpad {

// Deterministic random source. std::mt19937_64 output is fully specified
// by the standard; the standard *distributions* are not, so uniform and
// normal variates are derived here explicitly to keep generated bytes
// identical across compilers and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Integer in [lo, hi] via rejection-free scaling; bias is negligible for
  // the small ranges used here and the result stays platform-stable.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const double u = uniform01();
    return lo + static_cast<std::int64_t>(u * static_cast<double>(hi - lo + 1));
  }

  // Box-Muller transform; the spare variate is discarded so the stream
  // position depends only on the number of calls.
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * kPi * u2);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
};

// splitmix64 step, used to derive stream seeds (per split, per scene)
// from one global seed without correlated streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mcpad

#endif  // MCPAD_RNG_HPP
