#include <cmath>
#include <limits>
#include <numbers>

#include "graysl/kernels.hpp"

namespace graysl::kernels::scalar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTwoPiThird = 2.0 * std::numbers::pi / 3.0;

void phase_terms(const double* i1, const double* i2, const double* i3, double* num, double* den,
                 double* background, double* modulation, std::size_t n) {
  const double sqrt3 = std::numbers::sqrt3;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = i1[i];
    const double b = i2[i];
    const double c = i3[i];
    const double s = sqrt3 * (a - c);
    const double d = ((b + b) - a) - c;
    num[i] = s;
    den[i] = d;
    background[i] = ((a + b) + c) / 3.0;
    modulation[i] = std::sqrt(s * s + d * d) / 3.0;
  }
}

void convolve_line(const double* padded, double* out, std::size_t n, const double* taps,
                   std::size_t n_taps) {
  const std::size_t r = n_taps / 2;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(padded[i + r])) {
      out[i] = padded[i + r];
      continue;
    }
    double sum = 0.0;
    double wsum = 0.0;
    for (std::size_t j = 0; j < n_taps; ++j) {
      const double v = padded[i + j];
      const bool ok = !std::isnan(v);
      sum = sum + (ok ? v : 0.0) * taps[j];
      wsum = wsum + (ok ? taps[j] : 0.0);
    }
    out[i] = sum / wsum;
  }
}

void convolve_rows(const double* const* rows, const double* center, double* out, std::size_t n,
                   const double* taps, std::size_t n_taps) {
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(center[i])) {
      out[i] = center[i];
      continue;
    }
    double sum = 0.0;
    double wsum = 0.0;
    for (std::size_t j = 0; j < n_taps; ++j) {
      if (rows[j] == nullptr) continue;
      const double v = rows[j][i];
      const bool ok = !std::isnan(v);
      sum = sum + (ok ? v : 0.0) * taps[j];
      wsum = wsum + (ok ? taps[j] : 0.0);
    }
    out[i] = sum / wsum;
  }
}

void greater_than(const double* a, const double* b, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] > b[i] ? 1 : 0;
}

void accumulate_bits(std::int32_t* code, const std::uint8_t* bits, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) code[i] = code[i] * 2 + static_cast<std::int32_t>(bits[i]);
}

void select_branches(const std::uint8_t* label, const double* phi1, const double* phi2,
                     const double* phi3, const std::int32_t* k, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double base = kTwoPi * static_cast<double>(k[i]);
    switch (label[i]) {
      case kLabelLow:
        out[i] = (phi1[i] + base) - kTwoPiThird;
        break;
      case kLabelMid:
        out[i] = phi2[i] + base;
        break;
      case kLabelHigh:
        out[i] = (phi3[i] + base) + kTwoPiThird;
        break;
      default:
        out[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
}

}  // namespace

const KernelTable kTable{Isa::Scalar,  phase_terms,     convolve_line, convolve_rows,
                         greater_than, accumulate_bits, select_branches};

}  // namespace graysl::kernels::scalar
