#pragma once

#include <cmath>
#include <cstdint>

namespace drrp {

/// Named RNG streams. Every stochastic component draws from its own
/// stream so that, for a fixed seed, the scenario sequence seen by one
/// method is identical to that seen by any other method.
enum class RngStreamId : std::uint64_t {
  kInstance = 1,      // benchmark instance construction
  kScenario = 2,      // demand scenario draws (one substream per iteration)
  kRandomActions = 3, // random first-stage plans (method M3)
  kEvaluation = 4,    // Monte-Carlo evaluation scenarios
};

/// Counter-style generator: the state is derived by mixing
/// (seed, stream, substream), then advanced with splitmix64. Streams with
/// distinct identifiers are statistically independent for our purposes.
class RngStream {
 public:
  RngStream(std::uint64_t seed, RngStreamId stream, std::uint64_t substream = 0)
      : state_(mix(mix(mix(0x9e3779b97f4a7c15ull ^ seed,
                           static_cast<std::uint64_t>(stream)),
                       substream),
                   seed)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  /// Uniform integer in {a, ..., b} inclusive.
  int uniform_int(int a, int b) {
    const std::uint64_t span = static_cast<std::uint64_t>(b - a) + 1;
    return a + static_cast<int>(next_u64() % span);
  }

  double normal(double mean, double sd) {
    // Box-Muller; consumes exactly two uniforms.
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(6.283185307179586 * u2);
  }

  /// Poisson count by summing unit-rate exponentials until `mean` is
  /// exceeded. O(mean) but free of the underflow issues of the
  /// product-of-uniforms method at large rates.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    double acc = 0.0;
    int count = -1;
    while (acc <= mean) {
      double u = next_double();
      if (u <= 0.0) u = 0x1.0p-53;
      acc += -std::log(u);
      ++count;
    }
    return count;
  }

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace drrp
