#pragma once

#include <cmath>
#include <cstdint>

#include "skewt/special.hpp"

namespace skewt {

// Counter-style splitmix64 generator with substreams keyed by (seed, stream).
// State advances by a fixed increment; output is the splitmix64 finalizer, so
// the sequence is a pure function of (seed, stream, counter) and draws are
// reproducible independent of execution order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(mix(seed + 0x9E3779B97F4A7C15ull) ^ mix(stream + 0xD1B54A32D192ED03ull))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform on the open interval (0,1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  // Standard normal by inverse-cdf transform (one uniform per draw).
  double normal() { return normal_quantile(uniform()); }

  // Gamma(shape, scale 1) via Marsaglia-Tsang; consumes a variable number of draws.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::domain_error("CounterRng::gamma: shape must be positive");
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Chi-squared with k degrees of freedom.
  double chisq(double k) {
    if (!(k > 0.0)) throw std::domain_error("CounterRng::chisq: k must be positive");
    const double kr = std::round(k);
    if (std::fabs(k - kr) < 1e-12 && kr <= 64.0) {
      double s = 0.0;
      const int n = static_cast<int>(kr);
      for (int i = 0; i < n; ++i) {
        const double z = normal();
        s += z * z;
      }
      return s;
    }
    return 2.0 * gamma(0.5 * k);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace skewt
