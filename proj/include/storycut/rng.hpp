#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace storycut {

// splitmix64; used to derive independent sub-seeds (e.g. one per video).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 with hand-rolled distributions. The standard library's
// distribution objects are implementation-defined, so sampling goes through
// fixed formulas here to keep every draw pinned by this code alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() { return std::ldexp(static_cast<double>(engine_() >> 11), -53); }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t uniform_index(std::uint64_t n) {
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v / (UINT64_MAX / n);
  }

  // standard normal via Box-Muller (cached spare)
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Poisson by Knuth's product method; fine for the small means used here.
  std::uint64_t poisson(double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  double log_normal(double mean, double sigma_log) {
    // parameterized so that E[exp(N(mu, sigma))] == mean
    const double mu = std::log(mean) - 0.5 * sigma_log * sigma_log;
    return std::exp(normal(mu, sigma_log));
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace storycut
