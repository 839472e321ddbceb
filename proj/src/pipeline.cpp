#include "graysl/pipeline.hpp"

#include <cmath>
#include <cstdio>

#include "graysl/fringe.hpp"
#include "graysl/graycode.hpp"
#include "graysl/kernels.hpp"
#include "graysl/raster_io.hpp"
#include "parallel.hpp"

namespace graysl {

namespace {

constexpr std::uint64_t kComparisonNoiseBase = std::uint64_t{1} << 40;
constexpr std::uint64_t kCalibrationNoiseBase = std::uint64_t{1} << 41;

std::string group_name(const char* prefix, int group, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_g%04d.%s", prefix, group, ext);
  return buf;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double group_time(int group) { return static_cast<double>(frame_index(group, 1)); }

Stream simulate_stream(const RunConfig& cfg, const PatternBank& bank, bool with_comparison) {
  cfg.validate();
  Stream s;
  s.schedule = make_schedule(cfg.groups, cfg.spec.n_gray_bits);
  s.frames = gen_capture_sequence(cfg.scene, s.schedule.entries, bank, cfg.spec, cfg.model);
  if (with_comparison) {
    const std::size_t n = static_cast<std::size_t>(cfg.groups) * 6;
    s.comparison.resize(n);
    detail::parallel_for(n, [&](std::size_t i) {
      const int group = static_cast<int>(i / 6) + 1;
      const int slot = static_cast<int>(i % 6);
      const Role role{slot < 3 ? Role::Kind::Unit : Role::Kind::Heterodyne, slot % 3 + 1};
      const double t = frame_index(group, slot % 3);
      s.comparison[i] = {static_cast<int>(i), role,
                         render_capture(cfg.scene, t, bank.at(role), cfg.spec, cfg.model, kComparisonNoiseBase + i)};
    });
  }
  return s;
}

FrameInputs frame_inputs(const Stream& stream, const GroupAssembly& assembly) {
  FrameInputs in;
  for (int n = 0; n < 3; ++n) {
    in.sinusoids[static_cast<std::size_t>(n)] = &stream.frames.at(static_cast<std::size_t>(assembly.sinusoids[static_cast<std::size_t>(n)])).image;
  }
  for (int f : assembly.gray_frames) in.gray.push_back(&stream.frames.at(static_cast<std::size_t>(f)).image);
  if (!stream.comparison.empty()) {
    const std::size_t base = static_cast<std::size_t>(assembly.group - 1) * 6;
    for (std::size_t n = 0; n < 3; ++n) {
      in.unit[n] = &stream.comparison.at(base + n).image;
      in.heterodyne[n] = &stream.comparison.at(base + 3 + n).image;
    }
  }
  return in;
}

ReconstructOptions reconstruct_options(const RunConfig& cfg) {
  return {cfg.method, cfg.b_threshold, cfg.regions, cfg.scene.mm_per_px};
}

PhaseResult absolute_phase(const FrameInputs& in, const RasterF& Phi_ref, const PatternSpec& spec,
                           const ReconstructOptions& opt) {
  const WrappedTriple triple = wrapped_triple(*in.sinusoids[0], *in.sinusoids[1], *in.sinusoids[2], opt.b_threshold);
  PhaseResult out;
  switch (opt.method) {
    case Method::TriPU:
    case Method::Traditional: {
      const OrderMap k = decode_orders(in.gray, triple.background, triple.valid, CodewordTable(spec.n_gray_bits));
      out.out_of_table = k.out_of_table;
      if (opt.method == Method::Traditional) {
        out.Phi = unwrap_traditional(triple.phi2, k);
        out.valid = k.valid;
      } else {
        const ReferencePhase ref = reference_wrapped(Phi_ref, k);
        RegionLabels regions = divide_regions(triple, k, ref, spec, opt.regions);
        out.Phi = unwrap_tripu(triple, k, regions);
        out.valid = Mask(regions.label.width(), regions.label.height());
        for (std::size_t i = 0; i < out.valid.size(); ++i) {
          out.valid[i] = regions.label[i] != kernels::kLabelInvalid ? 1 : 0;
        }
        out.regions = std::move(regions);
      }
      break;
    }
    case Method::TwoFrequency:
    case Method::TwoWavelength: {
      const bool unit = opt.method == Method::TwoFrequency;
      const auto& set = unit ? in.unit : in.heterodyne;
      if (!set[0] || !set[1] || !set[2]) {
        throw ConfigError(to_string(opt.method) + " needs the " + (unit ? "unit-frequency" : "heterodyne") +
                          " pattern set");
      }
      const WrappedTriple other = wrapped_triple(*set[0], *set[1], *set[2], opt.b_threshold);
      out.Phi = unit ? unwrap_two_frequency(triple.phi2, other.phi2, spec.n_periods)
                     : unwrap_two_wavelength(other.phi2, triple.phi2, spec.n_periods);
      out.valid = mask_and(triple.valid, other.valid);
      break;
    }
  }
  for (std::size_t i = 0; i < out.Phi.size(); ++i) {
    if (!out.valid[i]) out.Phi[i] = kNaN;
  }
  return out;
}

Reconstruction reconstruct_frame(const FrameInputs& in, const CalibModel& model, const PatternSpec& spec,
                                 const ReconstructOptions& opt) {
  Reconstruction r;
  r.phase = absolute_phase(in, model.Phi_ref, spec, opt);
  RasterF dphi(r.phase.Phi.width(), r.phase.Phi.height());
  for (std::size_t i = 0; i < dphi.size(); ++i) dphi[i] = r.phase.Phi[i] - model.Phi_ref[i];
  HeightMap hm = apply_phase_height(model, dphi);
  r.height = std::move(hm.h);
  r.invalid_denominator = hm.invalid_denominator;
  r.extrapolated = hm.extrapolated;
  r.points = point_cloud(r.height, opt.mm_per_px, &r.phase.valid);
  return r;
}

std::vector<RasterF> render_static_set(const Scene& scene, double t, const PatternBank& bank,
                                       const PatternSpec& spec, const OpticalModel& model,
                                       std::uint64_t noise_base) {
  std::vector<Role> roles;
  for (int n = 1; n <= 3; ++n) roles.push_back({Role::Kind::Sinusoid, n});
  for (int b = 1; b <= spec.n_gray_bits; ++b) roles.push_back({Role::Kind::Gray, b});
  std::vector<RasterF> out(roles.size());
  detail::parallel_for(roles.size(), [&](std::size_t i) {
    out[i] = render_capture(scene, t, bank.at(roles[i]), spec, model, noise_base + i);
  });
  return out;
}

CalibModel calibrate(const RunConfig& cfg, const PatternBank& bank) {
  OpticalModel model = cfg.model;
  model.noise_sigma = 0.0;
  model.reflectivity.reset();
  auto plane_scene = [&](double h) {
    Scene s;
    s.parts.push_back(SceneObject::plane(h));
    s.mm_per_px = cfg.scene.mm_per_px;
    return s;
  };
  auto inputs_of = [&](const std::vector<RasterF>& set) {
    FrameInputs in;
    for (std::size_t n = 0; n < 3; ++n) in.sinusoids[n] = &set[n];
    for (std::size_t b = 3; b < set.size(); ++b) in.gray.push_back(&set[b]);
    return in;
  };

  const auto ref_set = render_static_set(plane_scene(0.0), 0.0, bank, cfg.spec, model, kCalibrationNoiseBase);
  const FrameInputs ref_in = inputs_of(ref_set);
  const RasterF Phi_ref =
      measure_reference(ref_set[0], ref_set[1], ref_set[2], ref_in.gray, cfg.spec, cfg.b_threshold);

  // Planes are static and noise-free, so they are unwrapped like the reference;
  // this also covers orders cut by the field, which regional division rejects.
  std::vector<PlaneMeasurement> planes(cfg.calib_heights.size());
  for (std::size_t p = 0; p < planes.size(); ++p) {
    const double h = cfg.calib_heights[p];
    const auto set = render_static_set(plane_scene(h), 0.0, bank, cfg.spec, model, kCalibrationNoiseBase);
    const FrameInputs in = inputs_of(set);
    const RasterF Phi = measure_reference(set[0], set[1], set[2], in.gray, cfg.spec, cfg.b_threshold);
    RasterF dphi(Phi_ref.width(), Phi_ref.height());
    for (std::size_t i = 0; i < dphi.size(); ++i) dphi[i] = Phi[i] - Phi_ref[i];
    planes[p] = {h, std::move(dphi)};
  }
  return fit_phase_height(planes, Phi_ref);
}

CompareResult run_compare(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  cfg.validate();
  const PatternBank bank = make_pattern_bank(cfg.spec, cfg.dithered, true);
  const Stream stream = simulate_stream(cfg, bank, true);
  const CalibModel calib = calibrate(cfg, bank);
  if (out_dir) std::filesystem::create_directories(*out_dir);

  const int first = first_complete_group(cfg.spec.n_gray_bits, cfg.assembly);
  const int last = last_complete_group(cfg.groups, cfg.spec.n_gray_bits, cfg.assembly);

  CompareResult result;
  for (Method m : kAllMethods) result.methods.push_back({m});
  std::vector<double> sq_sum(kAllMethods.size(), 0.0);
  std::vector<std::size_t> sq_n(kAllMethods.size(), 0);

  for (int j = first; j <= last; ++j) {
    const GroupAssembly a = assemble(stream.schedule, j, cfg.assembly);
    const FrameInputs in = frame_inputs(stream, a);
    const RasterF truth_phi = truth_absolute_phase(cfg.scene, cfg.spec, cfg.model, group_time(j));
    const RasterF truth_h = truth_height(cfg.scene, cfg.spec, group_time(j));
    for (std::size_t mi = 0; mi < kAllMethods.size(); ++mi) {
      ReconstructOptions opt = reconstruct_options(cfg);
      opt.method = kAllMethods[mi];
      const Reconstruction r = reconstruct_frame(in, calib, cfg.spec, opt);
      const ErrorRate er = error_rate(r.phase.Phi, truth_phi, r.phase.valid);
      auto& s = result.methods[mi];
      ++s.frames;
      s.errors += er.errors;
      s.counted += er.counted;
      for (std::size_t i = 0; i < r.height.size(); ++i) {
        if (!r.phase.valid[i] || !std::isfinite(r.height[i]) || !std::isfinite(truth_phi[i])) continue;
        const double d = r.height[i] - truth_h[i];
        sq_sum[mi] += d * d;
        ++sq_n[mi];
      }
      if (out_dir) {
        write_ply(r.points, *out_dir / group_name(to_string(opt.method).c_str(), j, "ply"));
        if (r.phase.regions) write_pgm(label_image(*r.phase.regions), *out_dir / group_name("labels", j, "pgm"));
      }
    }
  }

  result.csv = kCompareCsvHeader;
  for (std::size_t mi = 0; mi < result.methods.size(); ++mi) {
    auto& s = result.methods[mi];
    if (s.counted > 0) s.error_rate = static_cast<double>(s.errors) / static_cast<double>(s.counted);
    if (sq_n[mi] > 0) s.rms_mm = std::sqrt(sq_sum[mi] / static_cast<double>(sq_n[mi]));
    result.csv += to_string(s.method) + "," + format_number(cfg.model.noise_sigma) + "," +
                  format_number(cfg.model.defocus_sigma) + "," + std::to_string(s.frames) + "," +
                  std::to_string(s.errors) + "," + std::to_string(s.counted) + "," +
                  format_number(s.error_rate) + "," + format_number(s.rms_mm) + "\n";
  }
  if (out_dir) write_file(*out_dir / "compare.csv", result.csv);
  return result;
}

}  // namespace graysl
