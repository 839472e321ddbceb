#include "graysl/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace graysl {

ErrorRate error_rate(const RasterF& Phi, const RasterF& truth, const Mask& valid) {
  require_same_shape(Phi, truth, "error_rate");
  require_same_shape(Phi, valid, "error_rate");
  ErrorRate out;
  for (std::size_t i = 0; i < Phi.size(); ++i) {
    if (!valid[i] || !std::isfinite(Phi[i]) || !std::isfinite(truth[i])) continue;
    ++out.counted;
    if (std::abs(Phi[i] - truth[i]) > std::numbers::pi) ++out.errors;
  }
  if (out.counted > 0) out.rate = static_cast<double>(out.errors) / static_cast<double>(out.counted);
  return out;
}

PlaneFit fit_plane(const RasterF& h, const Mask& region) {
  require_same_shape(h, region, "fit_plane");
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (region[i] && std::isfinite(h[i])) idx.push_back(static_cast<Eigen::Index>(i));
  }
  if (idx.size() < 3) throw DegenerateError("plane fit needs at least three valid pixels");
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd z(n);
  // Centre the coordinates so the normal equations stay well conditioned.
  const double cx = h.width() / 2.0;
  const double cy = h.height() / 2.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto i = static_cast<std::size_t>(idx[static_cast<std::size_t>(r)]);
    const int x = static_cast<int>(i % static_cast<std::size_t>(h.width()));
    const int y = static_cast<int>(i / static_cast<std::size_t>(h.width()));
    a(r, 0) = x - cx;
    a(r, 1) = y - cy;
    a(r, 2) = 1.0;
    z(r) = h[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) throw DegenerateError("plane fit region is collinear");
  const Eigen::Vector3d p = qr.solve(z);
  PlaneFit fit;
  fit.a = p(0);
  fit.b = p(1);
  fit.c = p(2) - p(0) * cx - p(1) * cy;
  fit.rms = std::sqrt((a * p - z).squaredNorm() / static_cast<double>(n));
  fit.n = idx.size();
  return fit;
}

double plane_flatness_rms(const RasterF& h, const Mask& region) { return fit_plane(h, region).rms; }

SphereFit sphere_fit(std::span<const Point3> points) {
  if (points.size() < 4) throw DegenerateError("sphere fit needs at least four points");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += Eigen::Vector3d(p[0], p[1], p[2]);
  mean /= static_cast<double>(n);

  // |p|^2 = 2 c . p + d, in coordinates relative to the centroid.
  Eigen::MatrixXd a(n, 4);
  Eigen::VectorXd b(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& p = points[static_cast<std::size_t>(r)];
    const Eigen::Vector3d q = Eigen::Vector3d(p[0], p[1], p[2]) - mean;
    a.row(r) << 2.0 * q.x(), 2.0 * q.y(), 2.0 * q.z(), 1.0;
    b(r) = q.squaredNorm();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 4) throw DegenerateError("sphere fit points are coplanar");
  const Eigen::Vector4d s = qr.solve(b);
  Eigen::Vector3d c = s.head<3>();
  double radius2 = s(3) + c.squaredNorm();
  if (!(radius2 > 0.0)) throw DegenerateError("sphere fit produced a non-positive radius");
  double radius = std::sqrt(radius2);

  // One Gauss-Newton step on r_i = |q_i - c| - R.
  Eigen::MatrixXd j(n, 4);
  Eigen::VectorXd res(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& p = points[static_cast<std::size_t>(r)];
    const Eigen::Vector3d d = Eigen::Vector3d(p[0], p[1], p[2]) - mean - c;
    const double dist = d.norm();
    if (dist == 0.0) throw DegenerateError("sphere fit point coincides with the centre");
    j.row(r) << -d.x() / dist, -d.y() / dist, -d.z() / dist, -1.0;
    res(r) = dist - radius;
  }
  const Eigen::Vector4d step = j.colPivHouseholderQr().solve(-res);
  c += step.head<3>();
  radius += step(3);

  double ss = 0.0;
  for (const auto& p : points) {
    const double dist = (Eigen::Vector3d(p[0], p[1], p[2]) - mean - c).norm();
    ss += (dist - radius) * (dist - radius);
  }
  SphereFit out;
  const Eigen::Vector3d centre = c + mean;
  out.center = {centre.x(), centre.y(), centre.z()};
  out.radius = radius;
  out.rms = std::sqrt(ss / static_cast<double>(n));
  return out;
}

std::vector<double> step_heights(const RasterF& h, const std::vector<Mask>& bands) {
  if (bands.empty()) throw DegenerateError("step_heights needs at least one band");
  const PlaneFit base = fit_plane(h, bands.front());
  std::vector<double> out;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    require_same_shape(h, bands[b], "step_heights");
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < h.height(); ++y) {
      for (int x = 0; x < h.width(); ++x) {
        if (!bands[b](x, y) || !std::isfinite(h(x, y))) continue;
        sum += h(x, y) - (base.a * x + base.b * y + base.c);
        ++n;
      }
    }
    if (n == 0) throw DegenerateError("step band " + std::to_string(b + 1) + " has no valid pixels");
    out.push_back(sum / static_cast<double>(n));
  }
  return out;
}

std::vector<Point3> point_cloud(const RasterF& h, double mm_per_px, const Mask* region) {
  if (region) require_same_shape(h, *region, "point_cloud");
  std::vector<Point3> pts;
  for (int y = 0; y < h.height(); ++y) {
    for (int x = 0; x < h.width(); ++x) {
      if (region && !(*region)(x, y)) continue;
      if (!std::isfinite(h(x, y))) continue;
      pts.push_back({(x + 0.5) * mm_per_px, (y + 0.5) * mm_per_px, h(x, y)});
    }
  }
  return pts;
}

}  // namespace graysl
