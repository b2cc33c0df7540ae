#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "indet/common.hpp"

namespace indet {

/// Seeded generator with platform-independent output (mt19937_64 bits mapped
/// to doubles by hand; std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  /// Uniform in the closed disk |z| <= r.
  cplx in_disk(double r) {
    const double rad = r * std::sqrt(unit());
    const double ang = 2.0 * M_PI * unit();
    return std::polar(rad, ang);
  }

  /// Uniform in the box [re_lo, re_hi] x [im_lo, im_hi].
  cplx in_box(double re_lo, double re_hi, double im_lo, double im_hi) {
    const double re = uniform(re_lo, re_hi);
    return {re, uniform(im_lo, im_hi)};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace indet
