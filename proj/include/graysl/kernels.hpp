#pragma once

// Data-parallel inner loops shared by the fringe, graycode, tripu, patterns and
// simulator modules. Every kernel has a scalar reference implementation; SIMD
// variants are selected at runtime and must produce bit-identical results (no
// FMA, same association order), which the kernel equivalence tests enforce.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace graysl::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Region codes used by select_branches (and by tripu's label maps).
inline constexpr std::uint8_t kLabelInvalid = 0;
inline constexpr std::uint8_t kLabelLow = 1;
inline constexpr std::uint8_t kLabelMid = 2;
inline constexpr std::uint8_t kLabelHigh = 3;

struct KernelTable {
  Isa isa;

  // num = sqrt(3) * (i1 - i3); den = 2*i2 - i1 - i3;
  // background = (i1 + i2 + i3) / 3; modulation = sqrt(num^2 + den^2) / 3.
  void (*phase_terms)(const double* i1, const double* i2, const double* i3, double* num,
                      double* den, double* background, double* modulation, std::size_t n);

  // NaN-aware normalized convolution along a line. `padded` holds n + taps - 1
  // samples (NaN outside the line); out[i] is NaN when padded[i + r] is NaN, else
  // sum(w_j * v) / sum(w_j) over the finite samples of the window.
  void (*convolve_line)(const double* padded, double* out, std::size_t n, const double* taps,
                        std::size_t n_taps);

  // Same normalized convolution across rows: rows[j] points at the row under
  // tap j, or is null when that row lies outside the image.
  void (*convolve_rows)(const double* const* rows, const double* center, double* out,
                        std::size_t n, const double* taps, std::size_t n_taps);

  // out[i] = a[i] > b[i] ? 1 : 0 (false when either side is NaN).
  void (*greater_than)(const double* a, const double* b, std::uint8_t* out, std::size_t n);

  // code[i] = 2 * code[i] + bit[i].
  void (*accumulate_bits)(std::int32_t* code, const std::uint8_t* bits, std::size_t n);

  // Absolute phase by region label:
  //   low:  phi1 + 2*pi*k - 2*pi/3
  //   mid:  phi2 + 2*pi*k
  //   high: phi3 + 2*pi*k + 2*pi/3
  //   anything else: NaN
  void (*select_branches)(const std::uint8_t* label, const double* phi1, const double* phi2,
                          const double* phi3, const std::int32_t* k, double* out, std::size_t n);
};

/// The table chosen for this process: AVX2 when the CPU supports it, unless
/// GRAYSL_ISA=scalar is set in the environment or force_isa() was called.
const KernelTable& active();

/// Table for a specific ISA. Throws ConfigError if the ISA is unavailable.
const KernelTable& table_for(Isa isa);

bool isa_available(Isa isa) noexcept;

/// Overrides runtime selection (tests and benchmarks).
void force_isa(Isa isa);

namespace scalar {
extern const KernelTable kTable;
}
#if defined(GRAYSL_HAVE_AVX2)
namespace avx2 {
extern const KernelTable kTable;
}
#endif

}  // namespace graysl::kernels
