#include "graysl/fringe.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "graysl/kernels.hpp"

namespace graysl {

namespace {

constexpr double kPi = std::numbers::pi;

double atan2_half_open(double num, double den) {
  if (num == 0.0 && den == 0.0) return kNaN;
  const double phi = std::atan2(num, den);
  return phi == -kPi ? kPi : phi;
}

struct Terms {
  std::vector<double> num, den, background, modulation;
  explicit Terms(std::size_t n) : num(n), den(n), background(n), modulation(n) {}
};

Terms phase_terms(const RasterF& a, const RasterF& b, const RasterF& c) {
  Terms t(a.size());
  kernels::active().phase_terms(a.data(), b.data(), c.data(), t.num.data(), t.den.data(),
                                t.background.data(), t.modulation.data(), a.size());
  return t;
}

void check_shapes(const RasterF& i1, const RasterF& i2, const RasterF& i3, const char* what) {
  require_same_shape(i1, i2, what);
  require_same_shape(i1, i3, what);
}

}  // namespace

double wrap_phase(double phi) {
  if (!std::isfinite(phi)) return kNaN;
  double r = std::remainder(phi, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double wrapped_phase_at(double i1, double i2, double i3) {
  return atan2_half_open(std::sqrt(3.0) * (i1 - i3), ((i2 + i2) - i1) - i3);
}

RasterF wrapped_phase(const RasterF& i1, const RasterF& i2, const RasterF& i3) {
  check_shapes(i1, i2, i3, "wrapped_phase");
  const Terms t = phase_terms(i1, i2, i3);
  RasterF out(i1.width(), i1.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = atan2_half_open(t.num[i], t.den[i]);
  return out;
}

WrappedTriple wrapped_triple(const RasterF& i1, const RasterF& i2, const RasterF& i3,
                             double b_threshold) {
  check_shapes(i1, i2, i3, "wrapped_triple");
  const int w = i1.width();
  const int h = i1.height();
  const Terms t2 = phase_terms(i1, i2, i3);
  const Terms t1 = phase_terms(i2, i3, i1);
  const Terms t3 = phase_terms(i3, i1, i2);

  WrappedTriple out{RasterF(w, h), RasterF(w, h), RasterF(w, h),
                    RasterF(w, h, t2.background), RasterF(w, h, t2.modulation), Mask(w, h)};
  for (std::size_t i = 0; i < out.valid.size(); ++i) {
    const bool ok = t2.modulation[i] >= b_threshold && std::isfinite(t2.modulation[i]);
    const double p1 = ok ? atan2_half_open(t1.num[i], t1.den[i]) : kNaN;
    const double p2 = ok ? atan2_half_open(t2.num[i], t2.den[i]) : kNaN;
    const double p3 = ok ? atan2_half_open(t3.num[i], t3.den[i]) : kNaN;
    const bool finite = !std::isnan(p1) && !std::isnan(p2) && !std::isnan(p3);
    out.valid[i] = finite ? 1 : 0;
    out.phi1[i] = finite ? p1 : kNaN;
    out.phi2[i] = finite ? p2 : kNaN;
    out.phi3[i] = finite ? p3 : kNaN;
  }
  return out;
}

}  // namespace graysl
