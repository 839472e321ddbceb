#pragma once

#include <array>
#include <string>
#include <vector>

#include "graysl/patterns.hpp"
#include "graysl/sequence.hpp"
#include "graysl/simulator.hpp"
#include "graysl/tripu.hpp"

namespace graysl {

enum class Method { TriPU, Traditional, TwoFrequency, TwoWavelength };

Method parse_method(const std::string& s);
std::string to_string(Method m);
inline constexpr std::array<Method, 4> kAllMethods = {Method::TriPU, Method::Traditional,
                                                      Method::TwoFrequency, Method::TwoWavelength};

/// Axis-aligned rectangle [x0, x1) x [y0, y1) with zero reflectivity.
struct Shadow {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct RunConfig {
  PatternSpec spec;
  OpticalModel model;
  Scene scene;
  bool dithered = true;
  Method method = Method::TriPU;
  AssemblyPolicy assembly = AssemblyPolicy::Causal;
  double b_threshold = 0.02;
  RegionOptions regions;
  int groups = 4;
  std::vector<double> calib_heights{30.0, 60.0, 90.0, 120.0};
  std::vector<Shadow> shadows;
  std::string reflectivity_path;  // optional PGM, resolved by the caller
  double rate_hz = 2170.0;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// key = value lines; '#' starts a comment. Scene keys (plane, steps, sphere,
/// ramp) may repeat and form a composite. Malformed values raise ParseError,
/// unknown keys and out-of-domain values ConfigError.
RunConfig parse_config(const std::string& text);

/// Applies shadows (and a loaded reflectivity raster, if any) to cfg.model.
void apply_reflectivity(RunConfig& cfg, const RasterF* loaded);

}  // namespace graysl
