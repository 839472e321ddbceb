#pragma once

#include "graysl/raster.hpp"

namespace graysl {

/// The three staggered wrapped phases of one sinusoid triple, with background
/// and modulation. Phases are NaN wherever `valid` is 0.
struct WrappedTriple {
  RasterF phi1;  // sequence [I2, I3, I1]
  RasterF phi2;  // sequence [I1, I2, I3]
  RasterF phi3;  // sequence [I3, I1, I2]
  RasterF background;
  RasterF modulation;
  Mask valid;
};

inline constexpr double kDefaultBThreshold = 0.02;

/// atan2(sqrt(3) * (I1 - I3), 2*I2 - I1 - I3) in (-pi, pi]; NaN when both
/// arguments vanish.
RasterF wrapped_phase(const RasterF& i1, const RasterF& i2, const RasterF& i3);

/// Scalar form of wrapped_phase.
double wrapped_phase_at(double i1, double i2, double i3);

/// Maps into (-pi, pi].
double wrap_phase(double phi);

WrappedTriple wrapped_triple(const RasterF& i1, const RasterF& i2, const RasterF& i3,
                             double b_threshold = kDefaultBThreshold);

}  // namespace graysl
