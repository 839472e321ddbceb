#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "graysl/raster.hpp"
#include "graysl/raster_io.hpp"

namespace graysl {

struct ErrorRate {
  double rate = kNaN;  // NaN when no pixel is counted
  std::size_t errors = 0;
  std::size_t counted = 0;
};

/// Fraction of pixels (valid, both phases finite) with |Phi - truth| > pi.
ErrorRate error_rate(const RasterF& Phi, const RasterF& truth, const Mask& valid);

struct PlaneFit {
  double a = 0.0;  // z = a*x + b*y + c, x and y in pixels
  double b = 0.0;
  double c = 0.0;
  double rms = 0.0;
  std::size_t n = 0;
};

/// Least-squares plane over finite heights in `region`. Throws
/// DegenerateError with fewer than three non-collinear pixels.
PlaneFit fit_plane(const RasterF& h, const Mask& region);
double plane_flatness_rms(const RasterF& h, const Mask& region);

struct SphereFit {
  Point3 center{};
  double radius = 0.0;
  double rms = 0.0;
};

/// Algebraic fit followed by one Gauss-Newton pass on the geometric distance.
/// Throws DegenerateError for fewer than four or coplanar points.
SphereFit sphere_fit(std::span<const Point3> points);

/// Mean of h minus the base plane fitted on bands[0], per band.
std::vector<double> step_heights(const RasterF& h, const std::vector<Mask>& bands);

/// ((x + 0.5) * s, (y + 0.5) * s, h) for every finite height within `region`
/// (all pixels when region is empty).
std::vector<Point3> point_cloud(const RasterF& h, double mm_per_px, const Mask* region = nullptr);

}  // namespace graysl
