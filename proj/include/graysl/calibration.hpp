#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "graysl/patterns.hpp"
#include "graysl/raster.hpp"

namespace graysl {

inline constexpr double kPhaseEpsilon = 1e-6;

/// Per-pixel coefficients of 1/h = u + v/dPhi + w/dPhi^2 and the absolute
/// phase of the h = 0 plane. Uncalibrated pixels are NaN in u, v and w.
struct CalibModel {
  RasterF u;
  RasterF v;
  RasterF w;
  RasterF Phi_ref;
  std::vector<double> heights;       // plane heights used in the fit
  double dphi_lo = kNaN;             // calibrated phase-difference range
  double dphi_hi = kNaN;
  double max_residual = 0.0;         // max |1/h - model| over fitted samples, 1/mm
  std::size_t uncalibrated = 0;
  std::size_t rank_deficient = 0;
};

struct PlaneMeasurement {
  double h = 0.0;       // mm, > 0
  RasterF delta_phi;    // radians relative to the reference plane
};

/// Reference-plane absolute phase from one h = 0 capture set: phi2 + 2*pi*k,
/// with isolated order slips next to code boundaries repaired against the
/// running median along the phase axis.
RasterF measure_reference(const RasterF& i1, const RasterF& i2, const RasterF& i3,
                          const std::vector<const RasterF*>& gray, const PatternSpec& spec,
                          double b_threshold);

/// Median-consistency repair used by measure_reference: each value is moved
/// by the multiple of 2*pi that brings it closest to the median of its
/// window (2r + 1 samples along the phase axis).
RasterF repair_order_slips(const RasterF& Phi, const PatternSpec& spec, int r = 3);

/// Per-pixel least squares over planes with finite dPhi. Pixels with fewer
/// than three samples, any dPhi <= epsilon, or a rank-deficient system are
/// uncalibrated. Phi_ref is copied into the model.
CalibModel fit_phase_height(const std::vector<PlaneMeasurement>& planes, const RasterF& Phi_ref,
                            double epsilon = kPhaseEpsilon);

struct HeightMap {
  RasterF h;
  std::size_t invalid_denominator = 0;  // 1/h model <= 0
  std::size_t extrapolated = 0;         // dPhi outside the calibrated range
};

/// h = 1 / (u + v/dPhi + w/dPhi^2); dPhi < epsilon gives 0.
HeightMap apply_phase_height(const CalibModel& model, const RasterF& delta_phi,
                             double epsilon = kPhaseEpsilon);

/// Scalar mapping at one pixel; NaN when uncalibrated or out of model validity.
double phase_to_height(double u, double v, double w, double dphi, double epsilon = kPhaseEpsilon);

/// True when h(dPhi) increases across [lo, hi] for these coefficients.
bool mapping_monotone(double v, double w, double lo, double hi);

/// u.frf, v.frf, w.frf, phi_ref.frf and calib.txt in `dir`.
void save_calibration(const CalibModel& model, const std::filesystem::path& dir);
CalibModel load_calibration(const std::filesystem::path& dir);

}  // namespace graysl
