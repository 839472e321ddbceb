#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "graysl/fringe.hpp"
#include "graysl/graycode.hpp"
#include "graysl/patterns.hpp"
#include "graysl/raster.hpp"

namespace graysl {

/// phi_ref = Phi_ref - 2*pi*k where k is valid, NaN elsewhere. Not rewrapped.
struct ReferencePhase {
  RasterF phi_ref;
};

ReferencePhase reference_wrapped(const RasterF& Phi_ref, const OrderMap& k);

struct RegionOptions {
  int edge_radius = 2;
  bool correction = true;
};

/// Critical point C(i, x): position along the phase axis minimising |phi2|
/// within order i on orthogonal line x.
struct CriticalPoint {
  int pos = -1;          // -1: none (empty or unusable)
  double threshold = kNaN;
  bool corrected = false;
  bool usable = false;
};

struct RegionLabels {
  Grid<std::uint8_t> label;  // kernels::kLabel*
  int n_orders = 0;
  int n_lines = 0;           // extent orthogonal to the phase axis
  std::vector<CriticalPoint> points;  // [(i - 1) * n_lines + x]
  std::size_t unusable_lines = 0;     // (i, x) pairs with pixels but no usable C
  std::size_t corrected_points = 0;

  [[nodiscard]] const CriticalPoint& point(int order, int line) const {
    return points[static_cast<std::size_t>(order - 1) * static_cast<std::size_t>(n_lines) +
                  static_cast<std::size_t>(line)];
  }
};

/// Pixels of each order that lie within a (2r+1)^2 window of a pixel with a
/// different order or no order. Pixels outside the image are ignored.
Mask edge_set(const OrderMap& k, const Mask& usable, int edge_radius);

/// Uncorrected critical points: first minimum of |phi2| per (order, line).
std::vector<CriticalPoint> locate_critical(const WrappedTriple& triple, const OrderMap& k,
                                           const ReferencePhase& ref, const PatternSpec& spec);

/// Moves any critical point that lies in the edge set to the minimum of |phi2|
/// over the order's line minus the edge set; marks the line unusable when that
/// set is empty.
void correct_critical(std::vector<CriticalPoint>& points, const WrappedTriple& triple,
                      const OrderMap& k, const ReferencePhase& ref, const PatternSpec& spec,
                      int edge_radius);

RegionLabels divide_regions(const WrappedTriple& triple, const OrderMap& k, const ReferencePhase& ref,
                            const PatternSpec& spec, const RegionOptions& options = {});

/// low: phi1 + 2*pi*k - 2*pi/3; mid: phi2 + 2*pi*k; high: phi3 + 2*pi*k + 2*pi/3.
RasterF unwrap_tripu(const WrappedTriple& triple, const OrderMap& k, const RegionLabels& regions);

/// phi2 + 2*pi*k.
RasterF unwrap_traditional(const RasterF& phi2, const OrderMap& k);

/// Hierarchical unwrapping from a unit-frequency phase. Orders are 1-based:
/// Phi_low = phi_unit + pi, k = round((f_h * Phi_low + pi - phi_high) / (2*pi)).
RasterF unwrap_two_frequency(const RasterF& phi_high, const RasterF& phi_unit, int f_h);

/// Heterodyne: Phi_eq = (phi_high - phi_mid) mod 2*pi in [0, 2*pi), then the
/// two-frequency rule with f_h.
RasterF unwrap_two_wavelength(const RasterF& phi_mid, const RasterF& phi_high, int f_h);

/// Label map as an 8-bit image: low 64, mid 128, high 192, invalid 0 (scaled to [0,1]).
RasterF label_image(const RegionLabels& regions);

}  // namespace graysl
