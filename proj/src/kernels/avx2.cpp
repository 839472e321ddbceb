// AVX2 variants of the kernels in scalar.cpp. This file is the only one built
// with -mavx2; it is reached through the dispatch table after a CPUID check.

#include <immintrin.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <vector>

#include "graysl/kernels.hpp"

namespace graysl::kernels::avx2 {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTwoPiThird = 2.0 * std::numbers::pi / 3.0;

void phase_terms(const double* i1, const double* i2, const double* i3, double* num, double* den,
                 double* background, double* modulation, std::size_t n) {
  const __m256d sqrt3 = _mm256_set1_pd(std::numbers::sqrt3);
  const __m256d three = _mm256_set1_pd(3.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(i1 + i);
    const __m256d b = _mm256_loadu_pd(i2 + i);
    const __m256d c = _mm256_loadu_pd(i3 + i);
    const __m256d s = _mm256_mul_pd(sqrt3, _mm256_sub_pd(a, c));
    const __m256d d = _mm256_sub_pd(_mm256_sub_pd(_mm256_add_pd(b, b), a), c);
    _mm256_storeu_pd(num + i, s);
    _mm256_storeu_pd(den + i, d);
    _mm256_storeu_pd(background + i, _mm256_div_pd(_mm256_add_pd(_mm256_add_pd(a, b), c), three));
    const __m256d mag2 = _mm256_add_pd(_mm256_mul_pd(s, s), _mm256_mul_pd(d, d));
    _mm256_storeu_pd(modulation + i, _mm256_div_pd(_mm256_sqrt_pd(mag2), three));
  }
  if (i < n) {
    scalar::kTable.phase_terms(i1 + i, i2 + i, i3 + i, num + i, den + i, background + i,
                               modulation + i, n - i);
  }
}

void convolve_line(const double* padded, double* out, std::size_t n, const double* taps,
                   std::size_t n_taps) {
  const std::size_t r = n_taps / 2;
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d sum = zero;
    __m256d wsum = zero;
    for (std::size_t j = 0; j < n_taps; ++j) {
      const __m256d v = _mm256_loadu_pd(padded + i + j);
      const __m256d ok = _mm256_cmp_pd(v, v, _CMP_ORD_Q);
      const __m256d w = _mm256_set1_pd(taps[j]);
      sum = _mm256_add_pd(sum, _mm256_mul_pd(_mm256_and_pd(ok, v), w));
      wsum = _mm256_add_pd(wsum, _mm256_and_pd(ok, w));
    }
    const __m256d c = _mm256_loadu_pd(padded + i + r);
    const __m256d c_nan = _mm256_cmp_pd(c, c, _CMP_UNORD_Q);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(_mm256_div_pd(sum, wsum), c, c_nan));
  }
  if (i < n) scalar::kTable.convolve_line(padded + i, out + i, n - i, taps, n_taps);
}

void convolve_rows(const double* const* rows, const double* center, double* out, std::size_t n,
                   const double* taps, std::size_t n_taps) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d sum = zero;
    __m256d wsum = zero;
    for (std::size_t j = 0; j < n_taps; ++j) {
      if (rows[j] == nullptr) continue;
      const __m256d v = _mm256_loadu_pd(rows[j] + i);
      const __m256d ok = _mm256_cmp_pd(v, v, _CMP_ORD_Q);
      const __m256d w = _mm256_set1_pd(taps[j]);
      sum = _mm256_add_pd(sum, _mm256_mul_pd(_mm256_and_pd(ok, v), w));
      wsum = _mm256_add_pd(wsum, _mm256_and_pd(ok, w));
    }
    const __m256d c = _mm256_loadu_pd(center + i);
    const __m256d c_nan = _mm256_cmp_pd(c, c, _CMP_UNORD_Q);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(_mm256_div_pd(sum, wsum), c, c_nan));
  }
  if (i < n) {
    // Tail: scalar kernel over shifted row pointers.
    const double* shifted[64];
    const std::size_t m = n_taps < 64 ? n_taps : 64;
    for (std::size_t j = 0; j < m; ++j) shifted[j] = rows[j] ? rows[j] + i : nullptr;
    if (n_taps <= 64) {
      scalar::kTable.convolve_rows(shifted, center + i, out + i, n - i, taps, n_taps);
    } else {
      std::vector<const double*> many(n_taps);
      for (std::size_t j = 0; j < n_taps; ++j) many[j] = rows[j] ? rows[j] + i : nullptr;
      scalar::kTable.convolve_rows(many.data(), center + i, out + i, n - i, taps, n_taps);
    }
  }
}

void greater_than(const double* a, const double* b, std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gt = _mm256_cmp_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), _CMP_GT_OQ);
    const int m = _mm256_movemask_pd(gt);
    out[i] = static_cast<std::uint8_t>(m & 1);
    out[i + 1] = static_cast<std::uint8_t>((m >> 1) & 1);
    out[i + 2] = static_cast<std::uint8_t>((m >> 2) & 1);
    out[i + 3] = static_cast<std::uint8_t>((m >> 3) & 1);
  }
  if (i < n) scalar::kTable.greater_than(a + i, b + i, out + i, n - i);
}

void accumulate_bits(std::int32_t* code, const std::uint8_t* bits, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    std::int64_t packed;
    std::memcpy(&packed, bits + i, sizeof packed);
    const __m256i b = _mm256_cvtepu8_epi32(_mm_cvtsi64_si128(packed));
    __m256i c = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(code + i));
    c = _mm256_add_epi32(_mm256_slli_epi32(c, 1), b);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(code + i), c);
  }
  if (i < n) scalar::kTable.accumulate_bits(code + i, bits + i, n - i);
}

void select_branches(const std::uint8_t* label, const double* phi1, const double* phi2,
                     const double* phi3, const std::int32_t* k, double* out, std::size_t n) {
  const __m256d two_pi = _mm256_set1_pd(kTwoPi);
  const __m256d third = _mm256_set1_pd(kTwoPiThird);
  const __m256d nan = _mm256_set1_pd(std::numeric_limits<double>::quiet_NaN());
  const __m256i low_code = _mm256_set1_epi64x(kLabelLow);
  const __m256i mid_code = _mm256_set1_epi64x(kLabelMid);
  const __m256i high_code = _mm256_set1_epi64x(kLabelHigh);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    std::int32_t packed;
    std::memcpy(&packed, label + i, sizeof packed);
    const __m256i lab = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed));
    const __m256d is_low = _mm256_castsi256_pd(_mm256_cmpeq_epi64(lab, low_code));
    const __m256d is_mid = _mm256_castsi256_pd(_mm256_cmpeq_epi64(lab, mid_code));
    const __m256d is_high = _mm256_castsi256_pd(_mm256_cmpeq_epi64(lab, high_code));

    const __m128i k4 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(k + i));
    const __m256d base = _mm256_mul_pd(two_pi, _mm256_cvtepi32_pd(k4));
    const __m256d low = _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(phi1 + i), base), third);
    const __m256d mid = _mm256_add_pd(_mm256_loadu_pd(phi2 + i), base);
    const __m256d high = _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(phi3 + i), base), third);

    __m256d r = nan;
    r = _mm256_blendv_pd(r, low, is_low);
    r = _mm256_blendv_pd(r, mid, is_mid);
    r = _mm256_blendv_pd(r, high, is_high);
    _mm256_storeu_pd(out + i, r);
  }
  if (i < n) scalar::kTable.select_branches(label + i, phi1 + i, phi2 + i, phi3 + i, k + i, out + i, n - i);
}

}  // namespace

const KernelTable kTable{Isa::Avx2,    phase_terms,     convolve_line, convolve_rows,
                         greater_than, accumulate_bits, select_branches};

}  // namespace graysl::kernels::avx2
