#include "graysl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "graysl/kernels.hpp"
#include "parallel.hpp"

namespace graysl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double object_height(const SceneObject& o, double v_obj, double px, double py, double mm_per_px) {
  switch (o.kind) {
    case SceneObject::Kind::Plane:
      return o.h_mm;
    case SceneObject::Kind::Steps:
      for (const auto& b : o.bands) {
        if (v_obj >= b.start_px && v_obj < b.end_px) return b.h_mm;
      }
      return 0.0;
    case SceneObject::Kind::SphereCap: {
      const double dx = (px - o.center_x) * mm_per_px;
      const double dy = (py - o.center_y) * mm_per_px;
      const double r2 = dx * dx + dy * dy;
      const double rr = o.radius_mm * o.radius_mm;
      if (r2 >= rr) return 0.0;
      return std::max(0.0, o.apex_mm - o.radius_mm + std::sqrt(rr - r2));
    }
    case SceneObject::Kind::Ramp:
      return std::max(0.0, o.h_mm + o.slope_mm_per_px * v_obj);
  }
  return 0.0;
}

std::vector<double> gaussian_taps(double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> taps(static_cast<std::size_t>(2 * r + 1));
  for (int j = -r; j <= r; ++j) {
    taps[static_cast<std::size_t>(j + r)] = std::exp(-0.5 * (j * j) / (sigma * sigma));
  }
  return taps;
}

// Linear interpolation of a pattern line at continuous coordinate v (pixel
// centres sit at i + 0.5). NaN outside [0, n].
double sample_line(const RasterF& img, PhaseAxis axis, int ortho, double v) {
  const int n = axis == PhaseAxis::X ? img.width() : img.height();
  if (!(v >= 0.0 && v <= static_cast<double>(n))) return kNaN;
  auto at = [&](int i) { return axis == PhaseAxis::X ? img(i, ortho) : img(ortho, i); };
  const double u = std::clamp(v - 0.5, 0.0, static_cast<double>(n - 1));
  const int i0 = std::min(static_cast<int>(std::floor(u)), n - 1);
  const int i1 = std::min(i0 + 1, n - 1);
  const double f = u - i0;
  return at(i0) + (at(i1) - at(i0)) * f;
}

}  // namespace

SceneObject SceneObject::plane(double h) {
  SceneObject o;
  o.kind = Kind::Plane;
  o.h_mm = h;
  return o;
}

SceneObject SceneObject::steps(std::vector<StepBand> bands) {
  SceneObject o;
  o.kind = Kind::Steps;
  o.bands = std::move(bands);
  return o;
}

SceneObject SceneObject::sphere_cap(double cx, double cy, double radius_mm, double apex_mm) {
  SceneObject o;
  o.kind = Kind::SphereCap;
  o.center_x = cx;
  o.center_y = cy;
  o.radius_mm = radius_mm;
  o.apex_mm = apex_mm;
  return o;
}

SceneObject SceneObject::ramp(double h0, double slope_mm_per_px) {
  SceneObject o;
  o.kind = Kind::Ramp;
  o.h_mm = h0;
  o.slope_mm_per_px = slope_mm_per_px;
  return o;
}

double Scene::height(const PatternSpec& spec, int x, int y, double t) const {
  const double px = x + 0.5;
  const double py = y + 0.5;
  const double shift = velocity * t;
  double v = spec.axis == PhaseAxis::X ? px : py;
  v -= shift;
  const double sx = spec.axis == PhaseAxis::X ? px - shift : px;
  const double sy = spec.axis == PhaseAxis::Y ? py - shift : py;
  double h = 0.0;
  for (const auto& o : parts) h = std::max(h, object_height(o, v, sx, sy, mm_per_px));
  return h;
}

void Scene::validate() const {
  if (!(mm_per_px > 0.0)) throw ConfigError("mm_per_px must be positive");
  if (!std::isfinite(velocity)) throw ConfigError("velocity must be finite");
  for (const auto& o : parts) {
    switch (o.kind) {
      case SceneObject::Kind::Plane:
        if (!(o.h_mm >= 0.0)) throw ConfigError("plane height must be >= 0");
        break;
      case SceneObject::Kind::Steps: {
        auto bands = o.bands;
        std::ranges::sort(bands, {}, &StepBand::start_px);
        for (std::size_t i = 0; i < bands.size(); ++i) {
          if (!(bands[i].end_px > bands[i].start_px)) throw ConfigError("step band must have end > start");
          if (!(bands[i].h_mm >= 0.0)) throw ConfigError("step height must be >= 0");
          if (i > 0 && bands[i].start_px < bands[i - 1].end_px) throw ConfigError("step bands overlap");
        }
        break;
      }
      case SceneObject::Kind::SphereCap:
        if (!(o.radius_mm > 0.0)) throw ConfigError("sphere radius must be positive");
        // Apex above 2 * radius: a sphere resting on something taller.
        if (!(o.apex_mm > 0.0) || !std::isfinite(o.apex_mm)) throw ConfigError("sphere apex must be positive");
        break;
      case SceneObject::Kind::Ramp:
        if (!(o.h_mm >= 0.0) || !std::isfinite(o.slope_mm_per_px)) throw ConfigError("bad ramp");
        break;
    }
  }
}

RasterF truth_height(const Scene& scene, const PatternSpec& spec, double t) {
  RasterF h(spec.width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) h(x, y) = scene.height(spec, x, y, t);
  }
  return h;
}

void OpticalModel::validate() const {
  if (!(gain > 0.0)) throw ConfigError("gain K must be positive");
  if (!(saturation > 0.0)) throw ConfigError("saturation L must be positive");
  if (!(quadratic >= 0.0)) throw ConfigError("quadratic term must be >= 0");
  if (!(defocus_sigma >= 0.0)) throw ConfigError("defocus sigma must be >= 0");
  if (!std::isfinite(defocus_slope)) throw ConfigError("defocus slope must be finite");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  if (reflectivity) {
    for (double r : reflectivity->values()) {
      if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("reflectivity must lie in [0, 1]");
    }
  }
}

double truth_phase_shift(const OpticalModel& model, double h_mm) {
  return model.gain * h_mm / (1.0 + h_mm / model.saturation) + model.quadratic * h_mm * h_mm;
}

RasterF truth_absolute_phase(const Scene& scene, const PatternSpec& spec, const OpticalModel& model,
                             double t) {
  RasterF phi(spec.width, spec.height);
  const double extent = spec.phase_extent();
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double v = (spec.axis == PhaseAxis::X ? x : y) + 0.5;
      const double dphi = truth_phase_shift(model, scene.height(spec, x, y, t));
      const double vp = v + dphi * spec.period_px / kTwoPi;
      phi(x, y) = (vp >= 0.0 && vp <= extent) ? kTwoPi * v / spec.period_px + std::numbers::pi + dphi
                                              : kNaN;
    }
  }
  return phi;
}

RasterF defocus_blur(const RasterF& image, double sigma) {
  if (!(sigma > 0.0)) return image;
  const auto taps = gaussian_taps(sigma);
  const std::size_t r = taps.size() / 2;
  const auto& k = kernels::active();
  const int w = image.width();
  const int h = image.height();

  RasterF pass1(w, h);
  std::vector<double> padded(static_cast<std::size_t>(w) + 2 * r, kNaN);
  for (int y = 0; y < h; ++y) {
    const auto src = image.row(y);
    std::copy(src.begin(), src.end(), padded.begin() + static_cast<std::ptrdiff_t>(r));
    k.convolve_line(padded.data(), pass1.row(y).data(), static_cast<std::size_t>(w), taps.data(), taps.size());
  }

  RasterF out(w, h);
  std::vector<const double*> rows(taps.size());
  for (int y = 0; y < h; ++y) {
    for (std::size_t j = 0; j < taps.size(); ++j) {
      const long yy = static_cast<long>(y) + static_cast<long>(j) - static_cast<long>(r);
      rows[j] = (yy >= 0 && yy < h) ? pass1.row(static_cast<int>(yy)).data() : nullptr;
    }
    k.convolve_rows(rows.data(), pass1.row(y).data(), out.row(y).data(), static_cast<std::size_t>(w),
                    taps.data(), taps.size());
  }
  return out;
}

RasterF defocus_blur_varying(const RasterF& image, const PatternSpec& spec, const OpticalModel& model) {
  if (model.defocus_slope == 0.0) return defocus_blur(image, model.defocus_sigma);
  const int n = spec.axis == PhaseAxis::X ? image.width() : image.height();
  const int m = spec.axis == PhaseAxis::X ? image.height() : image.width();
  auto at = [&](const RasterF& r, int i, int o) -> double {
    return spec.axis == PhaseAxis::X ? r(i, o) : r(o, i);
  };
  auto ref = [&](RasterF& r, int i, int o) -> double& {
    return spec.axis == PhaseAxis::X ? r(i, o) : r(o, i);
  };
  // Separable: along the phase axis with sigma(i), then across it with the
  // same sigma(i), which is constant along that second direction.
  RasterF pass1 = image;
  RasterF out = image;
  std::vector<std::vector<double>> taps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double s = model.defocus_at(i + 0.5);
    if (s > 0.0) taps[static_cast<std::size_t>(i)] = gaussian_taps(s);
  }
  auto convolve = [](auto&& get, const std::vector<double>& t, int c, int len) {
    const int r = static_cast<int>(t.size() / 2);
    double sum = 0.0;
    double wsum = 0.0;
    for (int j = -r; j <= r; ++j) {
      const int q = c + j;
      if (q < 0 || q >= len) continue;
      const double v = get(q);
      if (std::isnan(v)) continue;
      sum = sum + v * t[static_cast<std::size_t>(j + r)];
      wsum = wsum + t[static_cast<std::size_t>(j + r)];
    }
    return sum / wsum;
  };
  for (int o = 0; o < m; ++o) {
    for (int i = 0; i < n; ++i) {
      const auto& t = taps[static_cast<std::size_t>(i)];
      if (t.empty() || std::isnan(at(image, i, o))) continue;
      ref(pass1, i, o) = convolve([&](int q) { return at(image, q, o); }, t, i, n);
    }
  }
  for (int i = 0; i < n; ++i) {
    const auto& t = taps[static_cast<std::size_t>(i)];
    for (int o = 0; o < m; ++o) {
      if (t.empty() || std::isnan(at(pass1, i, o))) {
        ref(out, i, o) = at(pass1, i, o);
        continue;
      }
      ref(out, i, o) = convolve([&](int q) { return at(pass1, i, q); }, t, o, m);
    }
  }
  return out;
}

RasterF render_capture(const Scene& scene, double t, const ProjectedPattern& pattern,
                       const PatternSpec& spec, const OpticalModel& model,
                       std::uint64_t frame_index) {
  if (pattern.image.width() != spec.width || pattern.image.height() != spec.height) {
    throw DimensionError("render_capture: pattern does not match the camera grid");
  }
  if (model.reflectivity) require_same_shape(*model.reflectivity, pattern.image, "render_capture reflectivity");

  RasterF img(spec.width, spec.height);
  const double disp_scale = spec.period_px / kTwoPi;
  const double extent = spec.phase_extent();
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const bool along_x = spec.axis == PhaseAxis::X;
      const double v = (along_x ? x : y) + 0.5;
      const double vp = v + truth_phase_shift(model, scene.height(spec, x, y, t)) * disp_scale;
      if (pattern.fringe) {
        img(x, y) = (vp >= 0.0 && vp <= extent)
                        ? sinusoid_value(pattern.fringe->period_px, pattern.fringe->shift, pattern.fringe->phi0, vp)
                        : kNaN;
      } else {
        img(x, y) = sample_line(pattern.image, spec.axis, along_x ? y : x, vp);
      }
    }
  }

  img = defocus_blur_varying(img, spec, model);

  if (model.reflectivity) {
    for (std::size_t i = 0; i < img.size(); ++i) img[i] *= (*model.reflectivity)[i];
  }

  if (model.noise_sigma > 0.0) {
    std::seed_seq seq{static_cast<std::uint32_t>(model.seed), static_cast<std::uint32_t>(model.seed >> 32),
                      static_cast<std::uint32_t>(frame_index),
                      static_cast<std::uint32_t>(frame_index >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, model.noise_sigma);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] += noise(rng);
  }

  for (double& v : img.values()) {
    if (!std::isnan(v)) v = std::clamp(v, 0.0, 1.0);
  }
  return img;
}

const ProjectedPattern& PatternBank::at(const Role& role) const {
  const std::vector<ProjectedPattern>* set = nullptr;
  switch (role.kind) {
    case Role::Kind::Sinusoid: set = &sinusoids; break;
    case Role::Kind::Gray: set = &gray; break;
    case Role::Kind::Unit: set = &unit; break;
    case Role::Kind::Heterodyne: set = &heterodyne; break;
  }
  if (role.index < 1 || static_cast<std::size_t>(role.index) > set->size()) {
    throw ConfigError("pattern bank has no pattern for role " + to_string(role));
  }
  return (*set)[static_cast<std::size_t>(role.index - 1)];
}

PatternBank make_pattern_bank(const PatternSpec& spec, bool dithered, bool with_comparison_sets) {
  spec.validate();
  PatternBank bank;
  bank.sinusoids = make_sinusoid_set(spec, dithered);
  bank.gray = make_gray_set(spec);
  if (with_comparison_sets) {
    if (spec.n_periods < 2) throw ConfigError("comparison sets need at least two periods");
    bank.unit = make_sinusoid_set(with_period_count(spec, 1), dithered);
    bank.heterodyne = make_sinusoid_set(with_period_count(spec, spec.n_periods - 1), dithered);
  }
  return bank;
}

std::vector<CapturedFrame> gen_capture_sequence(const Scene& scene, const std::vector<Role>& roles,
                                                const PatternBank& bank, const PatternSpec& spec,
                                                const OpticalModel& model) {
  if (roles.empty()) throw ConfigError("capture schedule is empty");
  scene.validate();
  model.validate();
  std::vector<CapturedFrame> frames(roles.size());
  detail::parallel_for(roles.size(), [&](std::size_t j) {
    frames[j] = {static_cast<int>(j), roles[j],
                 render_capture(scene, static_cast<double>(j), bank.at(roles[j]), spec, model, j)};
  });
  return frames;
}

}  // namespace graysl
