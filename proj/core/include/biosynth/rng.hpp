#ifndef BIOSYNTH_RNG_HPP
#define BIOSYNTH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace biosynth {

/// Mixes a 64-bit value into a well-distributed seed (splitmix64 finalizer).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent substreams of a signal's seed. Adding new subsystems at the
/// end never perturbs existing streams.
enum class Stream : std::uint64_t {
  recipe = 1,
  intervals = 2,
  gamma = 3,
  waveform = 4,
  noise = 5,
  artifact = 6,
  pair = 7,
};

/// Derives the seed of substream `s` for signal `index` under `root`.
/// This is the scheme recorded in dataset manifests.
inline std::uint64_t child_seed(std::uint64_t root, std::uint64_t index, Stream s) {
  return splitmix64(splitmix64(root + 0x9e3779b97f4a7c15ULL * (index + 1)) +
                    static_cast<std::uint64_t>(s));
}

/// Seeded random source with fixed draw consumption per call, so streams stay
/// reproducible across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes exactly two uniforms per pair.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Pareto with minimum `minimum` and shape `shape` (inverse CDF).
  double pareto(double minimum, double shape) {
    if (minimum <= 0 || shape <= 0) throw std::invalid_argument("pareto: bad parameters");
    return minimum * std::pow(1.0 - uniform01(), -1.0 / shape);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, bound).
  std::size_t index(std::size_t bound) {
    if (bound == 0) throw std::invalid_argument("index: zero bound");
    return static_cast<std::size_t>(uniform01() * static_cast<double>(bound)) % bound;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace biosynth

#endif
