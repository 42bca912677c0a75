#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace wg {

// Deterministic generator: mt19937_64 raw bits with hand-rolled conversions, because the
// standard distributions are not bit-reproducible across library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller, second value cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
    double u2 = uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * M_PI * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

  // circularly symmetric complex normal, unit variance (real and imag each variance 1/2)
  std::complex<double> cnormal() {
    return {normal() * M_SQRT1_2, normal() * M_SQRT1_2};
  }

private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0;
};

} // namespace wg
