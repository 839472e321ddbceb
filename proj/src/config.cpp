#include "graysl/config.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

namespace graysl {

namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

struct LineContext {
  int line;
  std::string key;
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("config line " + std::to_string(line) + " (" + key + "): " + what);
  }
};

double to_double(const std::string& s, const LineContext& ctx) {
  const std::string t = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) ctx.fail("expected a number, got '" + t + "'");
  return v;
}

long to_long(const std::string& s, const LineContext& ctx) {
  const std::string t = trim(s);
  long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) ctx.fail("expected an integer, got '" + t + "'");
  return v;
}

int to_int(const std::string& s, const LineContext& ctx) {
  const long v = to_long(s, ctx);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) ctx.fail("integer out of range");
  return static_cast<int>(v);
}

bool to_bool(const std::string& s, const LineContext& ctx) {
  const std::string t = trim(s);
  if (t == "true" || t == "on" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "off" || t == "0" || t == "no") return false;
  ctx.fail("expected a boolean, got '" + t + "'");
}

std::vector<double> number_list(const std::string& s, const LineContext& ctx) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(to_double(item, ctx));
  return out;
}

std::vector<double> fixed_list(const std::string& s, std::size_t n, const LineContext& ctx) {
  auto v = number_list(s, ctx);
  if (v.size() != n) ctx.fail("expected " + std::to_string(n) + " comma-separated values");
  return v;
}

std::vector<StepBand> step_list(const std::string& s, const LineContext& ctx) {
  std::vector<StepBand> bands;
  std::string triple;
  std::istringstream in(s);
  while (std::getline(in, triple, ';')) {
    if (trim(triple).empty()) continue;
    const auto v = fixed_list(triple, 3, ctx);
    bands.push_back({v[0], v[1], v[2]});
  }
  if (bands.empty()) ctx.fail("expected at least one 'start, end, height' triple");
  return bands;
}

}  // namespace

Method parse_method(const std::string& s) {
  if (s == "tripu") return Method::TriPU;
  if (s == "traditional") return Method::Traditional;
  if (s == "two_frequency") return Method::TwoFrequency;
  if (s == "two_wavelength") return Method::TwoWavelength;
  throw ConfigError("unknown method '" + s + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::TriPU: return "tripu";
    case Method::Traditional: return "traditional";
    case Method::TwoFrequency: return "two_frequency";
    case Method::TwoWavelength: return "two_wavelength";
  }
  return "?";
}

void RunConfig::validate() const {
  spec.validate();
  model.validate();
  scene.validate();
  if (!(b_threshold >= 0.0)) throw ConfigError("b_threshold must be >= 0");
  if (regions.edge_radius < 0) throw ConfigError("edge_radius must be >= 0");
  if (groups < 1) throw ConfigError("groups must be >= 1");
  if (calib_heights.size() < 3) throw ConfigError("calib_heights needs at least three heights");
  for (double h : calib_heights) {
    if (!(h > 0.0)) throw ConfigError("calibration heights must be > 0");
  }
  if (!(rate_hz > 0.0)) throw ConfigError("rate must be positive");
  if (model.reflectivity) require_same_shape(*model.reflectivity, RasterF(spec.width, spec.height), "reflectivity");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const LineContext ctx{line_no, key};

    if (key == "width") cfg.spec.width = to_int(value, ctx);
    else if (key == "height") cfg.spec.height = to_int(value, ctx);
    else if (key == "period") cfg.spec.period_px = to_double(value, ctx);
    else if (key == "periods") cfg.spec.n_periods = to_int(value, ctx);
    else if (key == "bits") cfg.spec.n_gray_bits = to_int(value, ctx);
    else if (key == "axis") cfg.spec.axis = parse_phase_axis(value);
    else if (key == "phi0") cfg.spec.phi0 = to_double(value, ctx);
    else if (key == "gain") cfg.model.gain = to_double(value, ctx);
    else if (key == "saturation") cfg.model.saturation = to_double(value, ctx);
    else if (key == "quadratic") cfg.model.quadratic = to_double(value, ctx);
    else if (key == "defocus") cfg.model.defocus_sigma = to_double(value, ctx);
    else if (key == "defocus_slope") cfg.model.defocus_slope = to_double(value, ctx);
    else if (key == "noise") cfg.model.noise_sigma = to_double(value, ctx);
    else if (key == "seed") {
      const long s = to_long(value, ctx);
      if (s < 0) ctx.fail("seed must be non-negative");
      cfg.model.seed = static_cast<std::uint64_t>(s);
    } else if (key == "patterns") {
      if (value == "dithered") cfg.dithered = true;
      else if (value == "ideal") cfg.dithered = false;
      else throw ConfigError("patterns must be 'dithered' or 'ideal'");
    } else if (key == "plane") cfg.scene.parts.push_back(SceneObject::plane(to_double(value, ctx)));
    else if (key == "steps") cfg.scene.parts.push_back(SceneObject::steps(step_list(value, ctx)));
    else if (key == "sphere") {
      const auto v = fixed_list(value, 4, ctx);
      cfg.scene.parts.push_back(SceneObject::sphere_cap(v[0], v[1], v[2], v[3]));
    } else if (key == "ramp") {
      const auto v = fixed_list(value, 2, ctx);
      cfg.scene.parts.push_back(SceneObject::ramp(v[0], v[1]));
    } else if (key == "velocity") cfg.scene.velocity = to_double(value, ctx);
    else if (key == "mm_per_px") cfg.scene.mm_per_px = to_double(value, ctx);
    else if (key == "method") cfg.method = parse_method(value);
    else if (key == "assembly") cfg.assembly = parse_assembly_policy(value);
    else if (key == "b_threshold") cfg.b_threshold = to_double(value, ctx);
    else if (key == "edge_radius") cfg.regions.edge_radius = to_int(value, ctx);
    else if (key == "correction") cfg.regions.correction = to_bool(value, ctx);
    else if (key == "groups") cfg.groups = to_int(value, ctx);
    else if (key == "calib_heights") cfg.calib_heights = number_list(value, ctx);
    else if (key == "reflectivity") cfg.reflectivity_path = value;
    else if (key == "shadow") {
      const auto v = fixed_list(value, 4, ctx);
      cfg.shadows.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
                             static_cast<int>(v[3])});
    } else if (key == "rate") cfg.rate_hz = to_double(value, ctx);
    else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return cfg;
}

void apply_reflectivity(RunConfig& cfg, const RasterF* loaded) {
  if (!loaded && cfg.shadows.empty()) return;
  RasterF r = loaded ? *loaded : RasterF(cfg.spec.width, cfg.spec.height, 1.0);
  require_same_shape(r, RasterF(cfg.spec.width, cfg.spec.height), "reflectivity");
  for (const auto& s : cfg.shadows) {
    for (int y = std::max(0, s.y0); y < std::min(r.height(), s.y1); ++y) {
      for (int x = std::max(0, s.x0); x < std::min(r.width(), s.x1); ++x) r(x, y) = 0.0;
    }
  }
  cfg.model.reflectivity = std::move(r);
}

}  // namespace graysl
