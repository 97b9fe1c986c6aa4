#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace subcausal {

// Seeded generator with hand-rolled distributions so that a given seed
// produces the same stream on every platform (the std distribution objects
// are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    // 53-bit mantissa in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    // Box-Muller; one variate per call keeps the stream position predictable
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Marsaglia-Tsang; shape < 1 handled through the boost gamma(a+1) * U^(1/a).
  double gamma(double shape) {
    if (shape < 1.0) {
      double u = uniform();
      while (u <= 0.0) u = uniform();
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
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double ga = gamma(a);
    const double gb = gamma(b);
    return ga / (ga + gb);
  }

  // Count of successes in n Bernoulli(p) trials by direct summation.
  long binomial(long n, double p) {
    if (n <= 0) return 0;
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    long k = 0;
    for (long i = 0; i < n; ++i) k += uniform() < p;
    return k;
  }

  // n draws over probs (need not be normalized); sequential conditional binomials.
  std::vector<long> multinomial(long n, std::span<const double> probs) {
    std::vector<long> out(probs.size(), 0);
    double remaining = 0.0;
    for (double w : probs) remaining += w;
    long left = n;
    for (std::size_t i = 0; i + 1 < probs.size() && left > 0; ++i) {
      const double p = remaining > 0.0 ? probs[i] / remaining : 0.0;
      const long k = binomial(left, p);
      out[i] = k;
      left -= k;
      remaining -= probs[i];
    }
    if (!out.empty()) out.back() += left;
    return out;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace subcausal
