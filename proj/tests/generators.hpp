#pragma once

// Seeded generators for the property tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "graysl/raster.hpp"

namespace graysl::testgen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  double phase() { return uniform(-std::numbers::pi, std::numbers::pi); }

  RasterF raster(int w, int h, double lo, double hi) {
    RasterF r(w, h);
    for (double& v : r.values()) v = uniform(lo, hi);
    return r;
  }

  // Values with NaN and the awkward magnitudes that break careless SIMD code.
  double nasty() {
    switch (integer(0, 9)) {
      case 0: return std::numeric_limits<double>::quiet_NaN();
      case 1: return 0.0;
      case 2: return -0.0;
      case 3: return 1.0;
      case 4: return uniform(-1e-300, 1e-300);
      default: return uniform(-2.0, 2.0);
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace graysl::testgen
