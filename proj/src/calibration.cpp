#include "graysl/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "graysl/fringe.hpp"
#include "graysl/graycode.hpp"
#include "graysl/raster_io.hpp"
#include "graysl/tripu.hpp"

namespace graysl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

RasterF repair_order_slips(const RasterF& Phi, const PatternSpec& spec, int r) {
  if (Phi.width() != spec.width || Phi.height() != spec.height) {
    throw DimensionError("repair_order_slips: raster does not match the pattern spec");
  }
  const int n = spec.phase_extent();
  const int m = spec.orthogonal_extent();
  auto idx = [&](int pos, int line) {
    return spec.axis == PhaseAxis::X ? Phi.index(pos, line) : Phi.index(line, pos);
  };
  RasterF out = Phi;
  std::vector<double> window;
  for (int line = 0; line < m; ++line) {
    for (int pos = 0; pos < n; ++pos) {
      const double p = Phi[idx(pos, line)];
      if (!std::isfinite(p)) continue;
      window.clear();
      for (int q = std::max(0, pos - r); q <= std::min(n - 1, pos + r); ++q) {
        const double s = Phi[idx(q, line)];
        // Compare in the ramp-free domain so the median is of the slips only.
        if (std::isfinite(s)) window.push_back(s - kTwoPi * (q - pos) / spec.period_px);
      }
      auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      out[idx(pos, line)] = p + kTwoPi * std::round((*mid - p) / kTwoPi);
    }
  }
  return out;
}

RasterF measure_reference(const RasterF& i1, const RasterF& i2, const RasterF& i3,
                          const std::vector<const RasterF*>& gray, const PatternSpec& spec,
                          double b_threshold) {
  const WrappedTriple triple = wrapped_triple(i1, i2, i3, b_threshold);
  const OrderMap k = decode_orders(gray, triple.background, triple.valid, CodewordTable(spec.n_gray_bits));
  return repair_order_slips(unwrap_traditional(triple.phi2, k), spec);
}

CalibModel fit_phase_height(const std::vector<PlaneMeasurement>& planes, const RasterF& Phi_ref,
                            double epsilon) {
  if (planes.size() < 3) throw ConfigError("phase-height fit needs at least three planes");
  for (std::size_t a = 0; a < planes.size(); ++a) {
    if (!(planes[a].h > 0.0)) throw ConfigError("calibration plane heights must be > 0");
    require_same_shape(planes[a].delta_phi, Phi_ref, "fit_phase_height");
    for (std::size_t b = 0; b < a; ++b) {
      if (planes[a].h == planes[b].h) throw ConfigError("calibration plane heights must be distinct");
    }
  }
  const int w = Phi_ref.width();
  const int h = Phi_ref.height();
  CalibModel model;
  model.u = model.v = model.w = RasterF(w, h, kNaN);
  model.Phi_ref = Phi_ref;
  for (const auto& p : planes) model.heights.push_back(p.h);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(planes.size()), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(planes.size()));
  for (std::size_t i = 0; i < Phi_ref.size(); ++i) {
    Eigen::Index rows = 0;
    bool guard = false;
    for (const auto& p : planes) {
      const double d = p.delta_phi[i];
      if (!std::isfinite(d)) continue;
      if (d <= epsilon) {
        guard = true;
        break;
      }
      a(rows, 0) = 1.0;
      a(rows, 1) = 1.0 / d;
      a(rows, 2) = 1.0 / (d * d);
      b(rows) = 1.0 / p.h;
      ++rows;
    }
    if (guard || rows < 3) {
      ++model.uncalibrated;
      continue;
    }
    const auto sa = a.topRows(rows);
    const auto sb = b.head(rows);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sa);
    if (qr.rank() < 3) {
      ++model.uncalibrated;
      ++model.rank_deficient;
      continue;
    }
    const Eigen::Vector3d x = qr.solve(sb);
    model.u[i] = x(0);
    model.v[i] = x(1);
    model.w[i] = x(2);
    model.max_residual = std::max(model.max_residual, (sa * x - sb).cwiseAbs().maxCoeff());
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double d = 1.0 / sa(r, 1);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  if (lo <= hi) {
    model.dphi_lo = lo;
    model.dphi_hi = hi;
  }
  return model;
}

double phase_to_height(double u, double v, double w, double dphi, double epsilon) {
  if (!std::isfinite(dphi) || !std::isfinite(u)) return kNaN;
  if (dphi < epsilon) return 0.0;
  const double inv = u + v / dphi + w / (dphi * dphi);
  return inv > 0.0 ? 1.0 / inv : kNaN;
}

HeightMap apply_phase_height(const CalibModel& model, const RasterF& delta_phi, double epsilon) {
  require_same_shape(model.u, delta_phi, "apply_phase_height");
  HeightMap out;
  out.h = RasterF(delta_phi.width(), delta_phi.height(), kNaN);
  for (std::size_t i = 0; i < delta_phi.size(); ++i) {
    const double d = delta_phi[i];
    if (!std::isfinite(d) || !std::isfinite(model.u[i])) continue;
    if (d >= epsilon && (d < model.dphi_lo || d > model.dphi_hi)) ++out.extrapolated;
    const double hv = phase_to_height(model.u[i], model.v[i], model.w[i], d, epsilon);
    if (std::isnan(hv)) ++out.invalid_denominator;
    out.h[i] = hv;
  }
  return out;
}

bool mapping_monotone(double v, double w, double lo, double hi) {
  // d(1/h)/d(dPhi) = -(v/dPhi^2 + 2w/dPhi^3); h rises iff v + 2w/dPhi > 0,
  // which is monotone in dPhi, so the endpoints decide.
  return v + 2.0 * w / lo > 0.0 && v + 2.0 * w / hi > 0.0;
}

void save_calibration(const CalibModel& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_raster(model.u, dir / "u.frf");
  write_raster(model.v, dir / "v.frf");
  write_raster(model.w, dir / "w.frf");
  write_raster(model.Phi_ref, dir / "phi_ref.frf");
  std::string meta = "format = graysl-calib 1\n";
  meta += "heights =";
  for (std::size_t i = 0; i < model.heights.size(); ++i) {
    meta += (i ? ", " : " ") + format_double(model.heights[i]);
  }
  meta += "\n";
  meta += "dphi_lo = " + format_double(model.dphi_lo) + "\n";
  meta += "dphi_hi = " + format_double(model.dphi_hi) + "\n";
  meta += "max_residual = " + format_double(model.max_residual) + "\n";
  meta += "uncalibrated = " + std::to_string(model.uncalibrated) + "\n";
  meta += "rank_deficient = " + std::to_string(model.rank_deficient) + "\n";
  write_file(dir / "calib.txt", meta);
}

CalibModel load_calibration(const std::filesystem::path& dir) {
  CalibModel m;
  m.u = read_raster(dir / "u.frf");
  m.v = read_raster(dir / "v.frf");
  m.w = read_raster(dir / "w.frf");
  m.Phi_ref = read_raster(dir / "phi_ref.frf");
  require_same_shape(m.u, m.v, "load_calibration");
  require_same_shape(m.u, m.w, "load_calibration");
  require_same_shape(m.u, m.Phi_ref, "load_calibration");
  std::istringstream in(read_file(dir / "calib.txt"));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "dphi_lo") m.dphi_lo = std::stod(value);
      else if (key == "dphi_hi") m.dphi_hi = std::stod(value);
      else if (key == "max_residual") m.max_residual = std::stod(value);
      else if (key == "uncalibrated") m.uncalibrated = std::stoul(value);
      else if (key == "rank_deficient") m.rank_deficient = std::stoul(value);
      else if (key == "heights") {
        std::istringstream hs(value);
        std::string item;
        while (std::getline(hs, item, ',')) m.heights.push_back(std::stod(item));
      }
    } catch (const std::logic_error&) {
      throw ParseError("calib.txt: bad value for '" + key + "'");
    }
  }
  return m;
}

}  // namespace graysl
