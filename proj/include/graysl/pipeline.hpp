#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graysl/calibration.hpp"
#include "graysl/config.hpp"
#include "graysl/metrics.hpp"
#include "graysl/sequence.hpp"
#include "graysl/simulator.hpp"
#include "graysl/tripu.hpp"

namespace graysl {

/// Rendered time-overlapped stream. For comparison runs each group also
/// carries unit-frequency and (periods-1)-period triples rendered at the
/// same instants as its sinusoids.
struct Stream {
  Schedule schedule;
  std::vector<CapturedFrame> frames;
  std::vector<CapturedFrame> comparison;  // group g: [(g-1)*6, (g-1)*6+6) = U1..U3, M1..M3
};

Stream simulate_stream(const RunConfig& cfg, const PatternBank& bank, bool with_comparison);

/// Time (frame units) at which a group's phase is measured: its S2 frame.
double group_time(int group);

/// Pointers into frame storage for one reconstruction.
struct FrameInputs {
  std::array<const RasterF*, 3> sinusoids{};
  std::vector<const RasterF*> gray;
  std::array<const RasterF*, 3> unit{};        // two_frequency only
  std::array<const RasterF*, 3> heterodyne{};  // two_wavelength only
};

FrameInputs frame_inputs(const Stream& stream, const GroupAssembly& assembly);

struct ReconstructOptions {
  Method method = Method::TriPU;
  double b_threshold = 0.02;
  RegionOptions regions;
  double mm_per_px = 0.1;
};

ReconstructOptions reconstruct_options(const RunConfig& cfg);

struct PhaseResult {
  RasterF Phi;  // NaN where !valid
  Mask valid;
  std::optional<RegionLabels> regions;  // tripu only
  std::size_t out_of_table = 0;
};

/// Absolute phase by the selected method.
PhaseResult absolute_phase(const FrameInputs& in, const RasterF& Phi_ref, const PatternSpec& spec,
                           const ReconstructOptions& opt);

struct Reconstruction {
  PhaseResult phase;
  RasterF height;
  std::vector<Point3> points;
  std::size_t invalid_denominator = 0;
  std::size_t extrapolated = 0;
};

Reconstruction reconstruct_frame(const FrameInputs& in, const CalibModel& model, const PatternSpec& spec,
                                 const ReconstructOptions& opt);

/// Reference measurement plus least-squares fit from noise-free renders of
/// flat planes at cfg.calib_heights.
CalibModel calibrate(const RunConfig& cfg, const PatternBank& bank);

/// Single-capture rendering of a static scene with the full main pattern set
/// (S1..S3, G1..GN) at time t, noise streams starting at noise_base.
std::vector<RasterF> render_static_set(const Scene& scene, double t, const PatternBank& bank,
                                       const PatternSpec& spec, const OpticalModel& model,
                                       std::uint64_t noise_base);

struct MethodSummary {
  Method method = Method::TriPU;
  std::size_t frames = 0;
  std::size_t errors = 0;
  std::size_t counted = 0;
  double error_rate = kNaN;
  double rms_mm = kNaN;  // height error against the ground truth over counted pixels
};

struct CompareResult {
  std::vector<MethodSummary> methods;
  std::string csv;
};

/// Renders one stream and analyses it with all four methods. When out_dir is
/// given, writes compare.csv, tripu region-label PGMs and one PLY per method
/// and output frame.
CompareResult run_compare(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir);

inline constexpr const char* kCompareCsvHeader =
    "# graysl-compare v1\nmethod,noise_sigma,defocus_sigma,frames,errors,counted,error_rate,rms_mm\n";
inline constexpr const char* kFramesCsvHeader =
    "# graysl-frames v1\nframe,group,method,valid_px,errors,counted,error_rate,unusable_lines,out_of_table,"
    "extrapolated,invalid_denominator,status\n";

/// Fixed-format number for reports (17 significant digits, "nan" for NaN).
std::string format_number(double x);

}  // namespace graysl
