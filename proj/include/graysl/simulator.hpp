#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "graysl/patterns.hpp"
#include "graysl/raster.hpp"
#include "graysl/sequence.hpp"

namespace graysl {

/// A band [start_px, end_px) along the phase axis raised to h_mm.
struct StepBand {
  double start_px = 0.0;
  double end_px = 0.0;
  double h_mm = 0.0;
};

/// One primitive of a scene. Coordinates are camera pixels; heights are mm.
struct SceneObject {
  enum class Kind { Plane, Steps, SphereCap, Ramp };
  Kind kind = Kind::Plane;
  double h_mm = 0.0;               // plane height; ramp height at phase coordinate 0
  std::vector<StepBand> bands;     // steps
  double center_x = 0.0;           // sphere cap centre, px
  double center_y = 0.0;
  double radius_mm = 0.0;          // sphere radius
  double apex_mm = 0.0;            // cap apex height above the reference plane
  double slope_mm_per_px = 0.0;    // ramp gradient along the phase axis

  static SceneObject plane(double h);
  static SceneObject steps(std::vector<StepBand> bands);
  static SceneObject sphere_cap(double cx, double cy, double radius_mm, double apex_mm);
  static SceneObject ramp(double h0, double slope_mm_per_px);
};

/// Composite height field: the maximum over its parts (zero where none
/// contributes), drifting along the phase axis by velocity px per frame.
struct Scene {
  std::vector<SceneObject> parts;
  double velocity = 0.0;
  double mm_per_px = 0.1;

  /// Height at pixel (x, y) at time t (frames).
  [[nodiscard]] double height(const PatternSpec& spec, int x, int y, double t) const;
  void validate() const;
};

RasterF truth_height(const Scene& scene, const PatternSpec& spec, double t);

struct OpticalModel {
  double gain = 0.1;           // K, rad/mm as h -> 0
  double saturation = 1000.0;  // L, mm
  double quadratic = 0.0;      // optional q*h^2 perturbation, rad/mm^2
  double defocus_sigma = 0.0;  // px
  double defocus_slope = 0.0;  // sigma grows by this much per px along the phase axis
  double noise_sigma = 0.0;    // normalized intensity
  std::optional<RasterF> reflectivity;
  std::uint64_t seed = 1;

  void validate() const;
  [[nodiscard]] double defocus_at(double v) const noexcept { return defocus_sigma + defocus_slope * v; }
};

/// K*h / (1 + h/L) + q*h^2.
double truth_phase_shift(const OpticalModel& model, double h_mm);

/// Absolute phase the reconstruction should recover at each pixel:
/// 2*pi*v/P + pi + truth_phase_shift(h).
RasterF truth_absolute_phase(const Scene& scene, const PatternSpec& spec, const OpticalModel& model,
                             double t);

/// One captured frame. `t` positions the scene; `frame_index` selects the noise
/// stream so the same t can be re-rendered with independent noise.
///
/// The displayed pattern is read at v' = v + dPhi(h) * P / (2*pi), so the phase
/// measured off a surface at height h exceeds the reference phase by dPhi(h).
/// Samples beyond the projector extent are NaN.
RasterF render_capture(const Scene& scene, double t, const ProjectedPattern& pattern,
                       const PatternSpec& spec, const OpticalModel& model,
                       std::uint64_t frame_index);

/// Gaussian blur ignoring NaN samples. Output is NaN where the input is.
RasterF defocus_blur(const RasterF& image, double sigma);
/// Blur whose sigma varies along the phase axis.
RasterF defocus_blur_varying(const RasterF& image, const PatternSpec& spec, const OpticalModel& model);

/// Everything a stream can display.
struct PatternBank {
  std::vector<ProjectedPattern> sinusoids;   // S1..S3
  std::vector<ProjectedPattern> gray;        // G1..GN
  std::vector<ProjectedPattern> unit;        // U1..U3, optional
  std::vector<ProjectedPattern> heterodyne;  // M1..M3, optional

  [[nodiscard]] const ProjectedPattern& at(const Role& role) const;
};

PatternBank make_pattern_bank(const PatternSpec& spec, bool dithered, bool with_comparison_sets);

struct CapturedFrame {
  int index = 0;
  Role role;
  RasterF image;
};

/// Renders entry j of the role list at time t = j (frames rendered
/// independently; parallel rendering does not change the output).
std::vector<CapturedFrame> gen_capture_sequence(const Scene& scene, const std::vector<Role>& roles,
                                                const PatternBank& bank, const PatternSpec& spec,
                                                const OpticalModel& model);

}  // namespace graysl
