#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "graysl/raster.hpp"

namespace graysl {

/// Image axis along which the projected phase increases.
enum class PhaseAxis { X, Y };

PhaseAxis parse_phase_axis(const std::string& s);
std::string to_string(PhaseAxis axis);

/// Geometry of the projected pattern stack.
///
/// Pixel i along the phase axis samples the continuous pattern at its centre,
/// v = i + 0.5, so a codeword boundary v = m * period never falls on a sample.
struct PatternSpec {
  double period_px = 70.0;
  int n_periods = 16;
  PhaseAxis axis = PhaseAxis::X;
  int n_gray_bits = 4;
  /// Aligns the wrapped phase with the codewords: with pi/3 the middle wrapped
  /// phase is wrap(2*pi*v/P + pi), cutting exactly at v = m*P.
  double phi0 = std::numbers::pi / 3.0;
  int width = 1120;
  int height = 64;

  [[nodiscard]] int phase_extent() const noexcept { return axis == PhaseAxis::X ? width : height; }
  [[nodiscard]] int orthogonal_extent() const noexcept {
    return axis == PhaseAxis::X ? height : width;
  }
  /// Throws ConfigError when an invariant does not hold.
  void validate() const;
};

/// Continuous three-step fringe: 0.5 + 0.5 cos(2*pi*v/P + 2*pi*(shift-1)/3 + phi0).
double sinusoid_value(double period_px, int shift, double phi0, double v);

/// Reflected-binary Gray codeword of 1-based order k.
std::uint32_t gray_codeword(int k);

/// 1-based fringe order covering phase coordinate v, clamped to [1, 2^N].
int order_at(const PatternSpec& spec, double v);

/// Bit i (1 = most significant) of the codeword labelling coordinate v.
int gray_bit_value(const PatternSpec& spec, int bit, double v);

/// Ideal sinusoid for shift index n in {1, 2, 3}.
RasterF gen_sinusoid(const PatternSpec& spec, int n);

/// Ordered dithering against a tiled 8x8 Bayer matrix:
/// out = 1 iff ideal > (bayer8(x mod 8, y mod 8) + 0.5) / 64.
RasterF dither_binarize(const RasterF& ideal);

/// Standard recursive 8x8 Bayer index matrix, entries 0..63, row-major [y][x].
const std::array<std::array<int, 8>, 8>& bayer8();

/// Gray-code pattern for bit i in [1, N], MSB first.
RasterF gen_gray_pattern(const PatternSpec& spec, int bit);

/// Decoded decimal V <-> 1-based fringe order k.
class CodewordTable {
 public:
  /// Table over all 2^N codewords, or only orders 1..n_orders when given.
  explicit CodewordTable(int n_bits, std::optional<int> n_orders = std::nullopt);

  [[nodiscard]] int n_bits() const noexcept { return n_bits_; }
  [[nodiscard]] int n_orders() const noexcept { return static_cast<int>(k_to_v_.size()); }
  /// V(k) = sum GC_i * 2^(N-i).
  [[nodiscard]] std::int32_t code_of(int k) const;
  /// Order for decoded V, or nullopt outside the table domain.
  [[nodiscard]] std::optional<int> order_of(std::int32_t v) const noexcept;

 private:
  int n_bits_;
  std::vector<std::int32_t> k_to_v_;
  std::vector<std::int32_t> v_to_k_;  // 0 = not in table
};

CodewordTable build_codeword_table(int n_bits);

/// A projected frame together with an optional analytic description. The
/// simulator samples `fringe` exactly when present and falls back to linear
/// interpolation of `image` otherwise.
struct FringeProfile {
  double period_px;
  int shift;
  double phi0;
};

struct ProjectedPattern {
  RasterF image;
  std::optional<FringeProfile> fringe;
};

/// Three sinusoids for a given period, either analytic-ideal or Bayer-dithered.
std::vector<ProjectedPattern> make_sinusoid_set(const PatternSpec& spec, bool dithered);

/// The N Gray-code patterns, bit 1 first.
std::vector<ProjectedPattern> make_gray_set(const PatternSpec& spec);

/// Same geometry with a different period count over the same extent (used for
/// the unit-frequency and heterodyne comparison sets).
PatternSpec with_period_count(const PatternSpec& spec, int n_periods);

/// key = value lines describing the spec.
std::string pattern_manifest(const PatternSpec& spec, bool dithered);

}  // namespace graysl
