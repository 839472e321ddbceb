// graysl: pattern generation, simulation, calibration and reconstruction.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "graysl/calibration.hpp"
#include "graysl/config.hpp"
#include "graysl/metrics.hpp"
#include "graysl/patterns.hpp"
#include "graysl/pipeline.hpp"
#include "graysl/raster_io.hpp"
#include "graysl/sequence.hpp"
#include "graysl/simulator.hpp"

namespace fs = std::filesystem;
using namespace graysl;

namespace {

enum Exit { kOk = 0, kOther = 1, kUsage = 2, kMissing = 3, kInvalid = 4, kParse = 5 };

class MissingInput : public Error {
 public:
  using Error::Error;
};

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw MissingInput("no such file or directory: " + p.string());
}

std::string numbered(const char* prefix, int i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04d.%s", prefix, i, ext);
  return buf;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

RunConfig load_config(const fs::path& path) {
  require_file(path);
  RunConfig cfg = parse_config(read_file(path));
  RasterF loaded;
  const RasterF* refl = nullptr;
  if (!cfg.reflectivity_path.empty()) {
    fs::path rp = cfg.reflectivity_path;
    if (rp.is_relative()) rp = path.parent_path() / rp;
    require_file(rp);
    loaded = read_pgm(rp);
    refl = &loaded;
  }
  apply_reflectivity(cfg, refl);
  cfg.validate();
  return cfg;
}

int cmd_gen_patterns(double period, int periods, int bits, int width, int height, const std::string& axis,
                     bool ideal, const fs::path& out) {
  PatternSpec spec;
  spec.period_px = period;
  spec.n_periods = periods;
  spec.n_gray_bits = bits;
  spec.axis = parse_phase_axis(axis);
  const int extent = static_cast<int>(std::ceil(period * periods - 1e-9));
  spec.width = spec.axis == PhaseAxis::X ? (width > 0 ? width : extent) : (width > 0 ? width : 912);
  spec.height = spec.axis == PhaseAxis::Y ? (height > 0 ? height : extent) : (height > 0 ? height : 912);
  spec.validate();
  fs::create_directories(out);
  const auto sin = make_sinusoid_set(spec, !ideal);
  for (int n = 1; n <= 3; ++n) {
    write_pgm(sin[static_cast<std::size_t>(n - 1)].image, out / ("s" + std::to_string(n) + ".pgm"), ideal ? 65535 : 255);
  }
  for (int b = 1; b <= bits; ++b) write_pgm(gen_gray_pattern(spec, b), out / ("g" + std::to_string(b) + ".pgm"));
  write_file(out / "manifest.txt", pattern_manifest(spec, !ideal));
  std::cout << "wrote " << 3 + bits << " patterns to " << out.string() << "\n";
  return kOk;
}

int cmd_simulate(const fs::path& config, const fs::path& out) {
  const RunConfig cfg = load_config(config);
  const PatternBank bank = make_pattern_bank(cfg.spec, cfg.dithered, false);
  const Stream stream = simulate_stream(cfg, bank, false);
  fs::create_directories(out);
  std::vector<ManifestEntry> manifest;
  for (const auto& f : stream.frames) {
    const std::string name = numbered("frame", f.index, "pgm");
    // Off-field samples carry no projector light; zero keeps them invalid on reload.
    RasterF img = f.image;
    for (double& v : img.values()) {
      if (std::isnan(v)) v = 0.0;
    }
    write_pgm(img, out / name, 65535);
    manifest.push_back({f.index, f.role, name});
  }
  write_file(out / "manifest.txt", format_frame_manifest(manifest));
  for (int g = 1; g <= cfg.groups; ++g) {
    write_raster(truth_height(cfg.scene, cfg.spec, group_time(g)), out / numbered("truth_h", g, "frf"));
    write_raster(truth_absolute_phase(cfg.scene, cfg.spec, cfg.model, group_time(g)),
                 out / numbered("truth_phi", g, "frf"));
  }
  std::cout << "wrote " << stream.frames.size() << " frames to " << out.string() << "\n";
  return kOk;
}

int cmd_calibrate(const fs::path& config, const fs::path& out) {
  const RunConfig cfg = load_config(config);
  const PatternBank bank = make_pattern_bank(cfg.spec, cfg.dithered, false);
  const CalibModel model = calibrate(cfg, bank);
  save_calibration(model, out);
  std::cout << "calibrated " << model.u.size() - model.uncalibrated << " of " << model.u.size()
            << " pixels, max residual " << format_number(model.max_residual) << " 1/mm\n";
  return kOk;
}

int cmd_reconstruct(const fs::path& config, const fs::path& frames_dir, const fs::path& calib_dir,
                    const fs::path& out) {
  const RunConfig cfg = load_config(config);
  if (cfg.method == Method::TwoFrequency || cfg.method == Method::TwoWavelength) {
    throw ConfigError("method " + to_string(cfg.method) +
                      " needs comparison pattern sets that a captured stream does not carry; use compare");
  }
  require_file(frames_dir / "manifest.txt");
  require_file(calib_dir / "calib.txt");
  const CalibModel calib = load_calibration(calib_dir);
  require_same_shape(calib.u, RasterF(cfg.spec.width, cfg.spec.height), "calibration vs config");

  const auto entries = parse_frame_manifest(read_file(frames_dir / "manifest.txt"));
  Stream stream;
  stream.schedule = make_schedule(std::max<int>(1, static_cast<int>(entries.size()) / Schedule::kGroupSize),
                                  cfg.spec.n_gray_bits);
  if (entries.size() % Schedule::kGroupSize != 0) {
    throw ParseError("manifest holds " + std::to_string(entries.size()) + " frames, not a whole number of groups");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].index != static_cast<int>(i) || !(entries[i].role == stream.schedule.entries[i])) {
      throw ParseError("manifest entry " + std::to_string(i) + " does not follow the projection schedule");
    }
    require_file(frames_dir / entries[i].file);
    RasterF img = read_pgm(frames_dir / entries[i].file);
    require_same_shape(img, calib.u, "frame vs calibration");
    stream.frames.push_back({entries[i].index, entries[i].role, std::move(img)});
  }

  std::vector<GroupAssembly> assemblies;
  if (cfg.assembly == AssemblyPolicy::Causal) {
    GroupAssembler assembler(cfg.spec.n_gray_bits);
    for (const auto& f : stream.frames) {
      if (auto a = assembler.push(f.role)) assemblies.push_back(*a);
    }
  } else {
    const int first = first_complete_group(cfg.spec.n_gray_bits, cfg.assembly);
    const int last = last_complete_group(stream.schedule.n_groups(), cfg.spec.n_gray_bits, cfg.assembly);
    for (int j = first; j <= last; ++j) assemblies.push_back(assemble(stream.schedule, j, cfg.assembly));
  }

  fs::create_directories(out);
  std::string csv = kFramesCsvHeader;
  const ReconstructOptions opt = reconstruct_options(cfg);
  int frame = 0;
  std::size_t failed = 0;
  for (const auto& a : assemblies) {
    const std::string head = std::to_string(frame++) + "," + std::to_string(a.group) + "," + to_string(opt.method) + ",";
    try {
      const Reconstruction r = reconstruct_frame(frame_inputs(stream, a), calib, cfg.spec, opt);
      write_raster(r.phase.Phi, out / numbered("phi", a.group, "frf"));
      write_raster(r.height, out / numbered("h", a.group, "frf"));
      write_ply(r.points, out / numbered("cloud", a.group, "ply"));
      if (r.phase.regions) write_pgm(label_image(*r.phase.regions), out / numbered("labels", a.group, "pgm"));
      ErrorRate er;
      const fs::path truth = frames_dir / numbered("truth_phi", a.group, "frf");
      if (fs::exists(truth)) er = error_rate(r.phase.Phi, read_raster(truth), r.phase.valid);
      csv += head + std::to_string(count_valid(r.phase.valid)) + "," + std::to_string(er.errors) + "," +
             std::to_string(er.counted) + "," + format_number(er.rate) + "," +
             std::to_string(r.phase.regions ? r.phase.regions->unusable_lines : 0) + "," +
             std::to_string(r.phase.out_of_table) + "," + std::to_string(r.extrapolated) + "," +
             std::to_string(r.invalid_denominator) + ",ok\n";
    } catch (const Error& e) {
      // One bad frame does not stop the stream.
      ++failed;
      std::cerr << "warning: group " << a.group << " failed: " << one_line(e.what()) << "\n";
      csv += head + "0,0,0,nan,0,0,0,0,failed\n";
    }
  }
  write_file(out / "frames.csv", csv);
  const Throughput tp = throughput_report(static_cast<long>(stream.frames.size()), cfg.rate_hz);
  std::cout << "reconstructed " << assemblies.size() - failed << " frames from " << stream.frames.size()
            << " captures (" << format_number(tp.fps) << " fps at " << format_number(cfg.rate_hz) << " Hz)\n";
  return kOk;
}

int cmd_compare(const fs::path& config, const fs::path& out) {
  const RunConfig cfg = load_config(config);
  const CompareResult r = run_compare(cfg, out);
  std::cout << r.csv;
  return kOk;
}

// Totals over a frames.csv (reconstruct) or compare.csv (compare).
int cmd_report(const fs::path& dir) {
  fs::path csv = dir / "frames.csv";
  if (!fs::exists(csv)) csv = dir / "compare.csv";
  require_file(csv);
  std::istringstream in(read_file(csv));
  std::string line;
  std::vector<std::string> header;
  std::size_t rows = 0, errors = 0, counted = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    if (header.empty()) {
      header = cols;
      continue;
    }
    if (cols.size() != header.size()) throw ParseError(csv.string() + ": row " + std::to_string(rows + 1) + " has the wrong column count");
    for (std::size_t i = 0; i < cols.size(); ++i) {
      try {
        if (header[i] == "errors") errors += std::stoul(cols[i]);
        if (header[i] == "counted") counted += std::stoul(cols[i]);
      } catch (const std::logic_error&) {
        throw ParseError(csv.string() + ": bad integer '" + cols[i] + "'");
      }
    }
    ++rows;
  }
  if (header.empty()) throw ParseError(csv.string() + ": missing header");
  std::cout << "rows = " << rows << "\nerrors = " << errors << "\ncounted = " << counted << "\nerror_rate = "
            << format_number(counted ? static_cast<double>(errors) / static_cast<double>(counted) : kNaN) << "\n";
  return kOk;
}

int fail(const char* code, int status, const std::string& message) {
  std::cerr << "error: code=" << code << " message=" << one_line(message) << "\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gray-code phase-shifting profilometry with tripartite phase unwrapping"};
  app.require_subcommand(1);

  double period = 70.0;
  int periods = 16, bits = 4, width = 0, height = 0;
  std::string axis = "x";
  bool ideal = false;
  std::string config, out, frames_dir, calib_dir, in_dir;

  auto* gen = app.add_subcommand("gen-patterns", "write the projected pattern stack as PGM files");
  gen->add_option("--period", period, "pixels per fringe period")->capture_default_str();
  gen->add_option("--periods", periods, "number of periods")->capture_default_str();
  gen->add_option("--bits", bits, "Gray-code bits")->capture_default_str();
  gen->add_option("--width", width, "projector width (default: fits the periods)");
  gen->add_option("--height", height, "projector height (default: fits the periods)");
  gen->add_option("--axis", axis, "phase axis, x or y")->capture_default_str();
  gen->add_flag("--ideal", ideal, "write ideal 16-bit sinusoids instead of dithered binary ones");
  gen->add_option("--out", out, "output directory")->required();

  auto* sim = app.add_subcommand("simulate", "render a time-overlapped capture stream");
  sim->add_option("--config", config, "run configuration")->required();
  sim->add_option("--out", out, "output directory")->required();

  auto* cal = app.add_subcommand("calibrate", "measure the reference plane and fit the phase-height map");
  cal->add_option("--config", config, "run configuration")->required();
  cal->add_option("--out", out, "calibration directory")->required();

  auto* rec = app.add_subcommand("reconstruct", "reconstruct every complete group of a stream");
  rec->add_option("--config", config, "run configuration")->required();
  rec->add_option("--frames", frames_dir, "directory written by simulate")->required();
  rec->add_option("--calib", calib_dir, "directory written by calibrate")->required();
  rec->add_option("--out", out, "output directory")->required();

  auto* cmp = app.add_subcommand("compare", "run all four unwrapping methods on one stream");
  cmp->add_option("--config", config, "run configuration")->required();
  cmp->add_option("--out", out, "output directory")->required();

  auto* rep = app.add_subcommand("report", "summarise frames.csv or compare.csv");
  rep->add_option("--in", in_dir, "directory with a report CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", kUsage, e.what());
  }

  try {
    if (*gen) return cmd_gen_patterns(period, periods, bits, width, height, axis, ideal, out);
    if (*sim) return cmd_simulate(config, out);
    if (*cal) return cmd_calibrate(config, out);
    if (*rec) return cmd_reconstruct(config, frames_dir, calib_dir, out);
    if (*cmp) return cmd_compare(config, out);
    if (*rep) return cmd_report(in_dir);
  } catch (const MissingInput& e) {
    return fail("missing_input", kMissing, e.what());
  } catch (const ParseError& e) {
    return fail("parse", kParse, e.what());
  } catch (const ConfigError& e) {
    return fail("config", kInvalid, e.what());
  } catch (const WarmupError& e) {
    return fail("warmup", kInvalid, e.what());
  } catch (const Error& e) {
    return fail("invariant", kInvalid, e.what());
  } catch (const std::exception& e) {
    return fail("internal", kOther, e.what());
  }
  return kOther;
}
