#include "graysl/tripu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "graysl/kernels.hpp"

namespace graysl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

// Pixels eligible for regional division.
Mask usable_mask(const WrappedTriple& triple, const OrderMap& k, const ReferencePhase& ref) {
  require_same_shape(triple.phi2, k.k, "divide_regions");
  require_same_shape(triple.phi2, ref.phi_ref, "divide_regions");
  Mask m(k.k.width(), k.k.height(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = (k.valid[i] && triple.valid[i] && std::isfinite(ref.phi_ref[i]) && std::isfinite(triple.phi2[i])) ? 1 : 0;
  }
  return m;
}

struct LineView {
  const PatternSpec& spec;
  [[nodiscard]] int length() const { return spec.phase_extent(); }
  [[nodiscard]] int lines() const { return spec.orthogonal_extent(); }
  [[nodiscard]] std::size_t index(const Mask& g, int pos, int line) const {
    return spec.axis == PhaseAxis::X ? g.index(pos, line) : g.index(line, pos);
  }
};

void check_spec(const PatternSpec& spec, const IntGrid& k) {
  if (spec.width != k.width() || spec.height != k.height()) {
    throw DimensionError("divide_regions: pattern spec does not match the raster size");
  }
}

void sliding_extreme(std::vector<std::int32_t>& lo, std::vector<std::int32_t>& hi, int w, int h, int r,
                     bool along_x) {
  std::vector<std::int32_t> nlo(lo.size());
  std::vector<std::int32_t> nhi(hi.size());
  const int n = along_x ? w : h;
  const int m = along_x ? h : w;
  for (int o = 0; o < m; ++o) {
    for (int p = 0; p < n; ++p) {
      std::int32_t a = std::numeric_limits<std::int32_t>::max();
      std::int32_t b = std::numeric_limits<std::int32_t>::min();
      for (int q = std::max(0, p - r); q <= std::min(n - 1, p + r); ++q) {
        const std::size_t idx = along_x ? static_cast<std::size_t>(o) * w + q : static_cast<std::size_t>(q) * w + o;
        a = std::min(a, lo[idx]);
        b = std::max(b, hi[idx]);
      }
      const std::size_t out = along_x ? static_cast<std::size_t>(o) * w + p : static_cast<std::size_t>(p) * w + o;
      nlo[out] = a;
      nhi[out] = b;
    }
  }
  lo.swap(nlo);
  hi.swap(nhi);
}

}  // namespace

ReferencePhase reference_wrapped(const RasterF& Phi_ref, const OrderMap& k) {
  require_same_shape(Phi_ref, k.k, "reference_wrapped");
  RasterF out(Phi_ref.width(), Phi_ref.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = k.valid[i] ? Phi_ref[i] - kTwoPi * k.k[i] : kNaN;
  }
  return {std::move(out)};
}

Mask edge_set(const OrderMap& k, const Mask& usable, int edge_radius) {
  require_same_shape(k.k, usable, "edge_set");
  if (edge_radius < 0) throw RangeError("edge_radius must be >= 0");
  const int w = k.k.width();
  const int h = k.k.height();
  std::vector<std::int32_t> lo(k.k.size());
  for (std::size_t i = 0; i < lo.size(); ++i) lo[i] = usable[i] ? k.k[i] : -1;
  std::vector<std::int32_t> hi = lo;
  if (edge_radius > 0) {
    sliding_extreme(lo, hi, w, h, edge_radius, true);
    sliding_extreme(lo, hi, w, h, edge_radius, false);
  }
  Mask e(w, h, 0);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = (usable[i] && lo[i] != hi[i]) ? 1 : 0;
  return e;
}

std::vector<CriticalPoint> locate_critical(const WrappedTriple& triple, const OrderMap& k,
                                           const ReferencePhase& ref, const PatternSpec& spec) {
  check_spec(spec, k.k);
  const Mask usable = usable_mask(triple, k, ref);
  const LineView view{spec};
  const int n_orders = 1 << k.n_bits;
  std::vector<CriticalPoint> pts(static_cast<std::size_t>(n_orders) * view.lines());
  for (int line = 0; line < view.lines(); ++line) {
    for (int pos = 0; pos < view.length(); ++pos) {
      const std::size_t idx = view.index(usable, pos, line);
      if (!usable[idx]) continue;
      auto& c = pts[static_cast<std::size_t>(k.k[idx] - 1) * view.lines() + line];
      const double a = std::abs(triple.phi2[idx]);
      if (c.pos < 0 || a < std::abs(triple.phi2[view.index(usable, c.pos, line)])) {
        c.pos = pos;
        c.threshold = ref.phi_ref[idx];
        c.usable = true;
      }
    }
  }
  return pts;
}

void correct_critical(std::vector<CriticalPoint>& points, const WrappedTriple& triple,
                      const OrderMap& k, const ReferencePhase& ref, const PatternSpec& spec,
                      int edge_radius) {
  check_spec(spec, k.k);
  const Mask usable = usable_mask(triple, k, ref);
  const Mask edge = edge_set(k, usable, edge_radius);
  const LineView view{spec};
  for (int line = 0; line < view.lines(); ++line) {
    // Interior minimum per order along this line.
    std::vector<int> best(static_cast<std::size_t>(1) << k.n_bits, -1);
    for (int pos = 0; pos < view.length(); ++pos) {
      const std::size_t idx = view.index(usable, pos, line);
      if (!usable[idx] || edge[idx]) continue;
      int& b = best[static_cast<std::size_t>(k.k[idx] - 1)];
      if (b < 0 || std::abs(triple.phi2[idx]) < std::abs(triple.phi2[view.index(usable, b, line)])) b = pos;
    }
    for (std::size_t order = 0; order < best.size(); ++order) {
      auto& c = points[order * view.lines() + line];
      if (c.pos < 0 || !edge[view.index(usable, c.pos, line)]) continue;
      const int b = best[order];
      if (b < 0) {
        c.usable = false;
        c.threshold = kNaN;
      } else {
        c.pos = b;
        c.threshold = ref.phi_ref[view.index(usable, b, line)];
        c.corrected = true;
      }
    }
    // An order whose visible part has no middle third (cut by the field or a
    // shadow) has no zero crossing to divide at.
    for (std::size_t order = 0; order < best.size(); ++order) {
      auto& c = points[order * view.lines() + line];
      if (c.pos < 0 || !c.usable) continue;
      if (std::abs(triple.phi2[view.index(usable, c.pos, line)]) >= kPi / 3.0) {
        c.usable = false;
        c.threshold = kNaN;
      }
    }
  }
}

RegionLabels divide_regions(const WrappedTriple& triple, const OrderMap& k, const ReferencePhase& ref,
                            const PatternSpec& spec, const RegionOptions& options) {
  check_spec(spec, k.k);
  RegionLabels out;
  out.n_orders = 1 << k.n_bits;
  out.n_lines = spec.orthogonal_extent();
  out.points = locate_critical(triple, k, ref, spec);
  if (options.correction) correct_critical(out.points, triple, k, ref, spec, options.edge_radius);
  for (const auto& c : out.points) {
    if (c.pos >= 0 && !c.usable) ++out.unusable_lines;
    if (c.corrected) ++out.corrected_points;
  }

  const Mask usable = usable_mask(triple, k, ref);
  out.label = Grid<std::uint8_t>(k.k.width(), k.k.height(), kernels::kLabelInvalid);
  const LineView view{spec};
  for (int line = 0; line < view.lines(); ++line) {
    for (int pos = 0; pos < view.length(); ++pos) {
      const std::size_t idx = view.index(usable, pos, line);
      if (!usable[idx]) continue;
      const auto& c = out.point(k.k[idx], line);
      if (!c.usable) continue;
      const double p2 = triple.phi2[idx];
      std::uint8_t label;
      if (std::abs(p2) < kPi / 3.0) {
        label = kernels::kLabelMid;
      } else {
        // Ties (C itself when it is not mid) go low.
        label = ref.phi_ref[idx] > c.threshold ? kernels::kLabelHigh : kernels::kLabelLow;
      }
      out.label[idx] = label;
    }
  }
  return out;
}

RasterF unwrap_tripu(const WrappedTriple& triple, const OrderMap& k, const RegionLabels& regions) {
  require_same_shape(triple.phi2, k.k, "unwrap_tripu");
  require_same_shape(triple.phi2, regions.label, "unwrap_tripu");
  RasterF out(k.k.width(), k.k.height());
  kernels::active().select_branches(regions.label.data(), triple.phi1.data(), triple.phi2.data(),
                                    triple.phi3.data(), k.k.data(), out.data(), out.size());
  return out;
}

RasterF unwrap_traditional(const RasterF& phi2, const OrderMap& k) {
  require_same_shape(phi2, k.k, "unwrap_traditional");
  RasterF out(phi2.width(), phi2.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = k.valid[i] ? phi2[i] + kTwoPi * k.k[i] : kNaN;
  return out;
}

RasterF unwrap_two_frequency(const RasterF& phi_high, const RasterF& phi_unit, int f_h) {
  require_same_shape(phi_high, phi_unit, "unwrap_two_frequency");
  if (f_h < 1) throw RangeError("f_h must be >= 1");
  RasterF out(phi_high.width(), phi_high.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double low = phi_unit[i] + kPi;
    const double order = std::round((f_h * low + kPi - phi_high[i]) / kTwoPi);
    out[i] = phi_high[i] + kTwoPi * order;
  }
  return out;
}

RasterF unwrap_two_wavelength(const RasterF& phi_mid, const RasterF& phi_high, int f_h) {
  require_same_shape(phi_high, phi_mid, "unwrap_two_wavelength");
  RasterF eq(phi_high.width(), phi_high.height());
  for (std::size_t i = 0; i < eq.size(); ++i) {
    double d = std::fmod(phi_high[i] - phi_mid[i], kTwoPi);
    if (d < 0.0) d += kTwoPi;
    eq[i] = d - kPi;  // unit-frequency phase in the same convention as a measured one
  }
  return unwrap_two_frequency(phi_high, eq, f_h);
}

RasterF label_image(const RegionLabels& regions) {
  RasterF out(regions.label.width(), regions.label.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (regions.label[i]) {
      case kernels::kLabelLow: out[i] = 64.0 / 255.0; break;
      case kernels::kLabelMid: out[i] = 128.0 / 255.0; break;
      case kernels::kLabelHigh: out[i] = 192.0 / 255.0; break;
      default: out[i] = 0.0; break;
    }
  }
  return out;
}

}  // namespace graysl
