#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace actrack {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Mixes a 64-bit value; used to derive decorrelated engine seeds from
// (seed, stream) pairs.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream. Every consumer (world simulation, filter,
/// policy) owns its own stream so draws of one never perturb another's
/// sequence. All distributions are generated in-house so the byte-exact
/// reproducibility contract does not depend on library internals.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), n >= 1.
  int uniform_int(int n) {
    const int k = static_cast<int>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  /// Standard normal draw (Box-Muller, cached spare).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace actrack
