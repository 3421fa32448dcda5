#ifndef APCS_RNG_HPP
#define APCS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace apcs {

// Deterministic random stream. The variate transforms live here rather than
// in <random> distribution objects, so a fixed seed yields bit-identical
// streams regardless of the standard library implementation.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1).
  double uniform() {
    return (gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Standard normal via Box-Muller, two uniforms per draw (no cached spare).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  std::uint64_t raw() { return gen_(); }

private:
  std::mt19937_64 gen_;
};

} // namespace apcs

#endif
