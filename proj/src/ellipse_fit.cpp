#include "blastomere/ellipse_fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "blastomere/error.hpp"

namespace blastomere {

Conic fit_conic(std::span<const Vec2> points) {
  if (points.size() < 5) throw DegenerateGeometry("ellipse fit needs at least 5 points");

  // Work in centred, scaled coordinates for conditioning.
  Vec2 mean{0.0, 0.0};
  for (Vec2 p : points) mean = mean + p;
  mean = mean * (1.0 / static_cast<double>(points.size()));
  double spread = 0.0;
  for (Vec2 p : points) spread += norm(p - mean);
  spread /= static_cast<double>(points.size());
  if (!(spread > 0.0)) throw DegenerateGeometry("ellipse fit points coincide");
  const double s = 1.0 / spread;

  Eigen::Matrix3d s1 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d s2 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d s3 = Eigen::Matrix3d::Zero();
  for (Vec2 p : points) {
    const double x = (p.x - mean.x) * s;
    const double y = (p.y - mean.y) * s;
    const Eigen::Vector3d q(x * x, x * y, y * y);
    const Eigen::Vector3d l(x, y, 1.0);
    s1 += q * q.transpose();
    s2 += q * l.transpose();
    s3 += l * l.transpose();
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(s3);
  if (!lu.isInvertible()) throw DegenerateGeometry("ellipse fit points are collinear");
  const Eigen::Matrix3d t = -lu.inverse() * s2.transpose();
  const Eigen::Matrix3d m0 = s1 + s2 * t;
  Eigen::Matrix3d m;
  m.row(0) = m0.row(2) / 2.0;
  m.row(1) = -m0.row(1);
  m.row(2) = m0.row(0) / 2.0;

  Eigen::EigenSolver<Eigen::Matrix3d> es(m);
  if (es.info() != Eigen::Success) throw DegenerateGeometry("ellipse fit eigen solve failed");
  int best = -1;
  double best_cond = std::numeric_limits<double>::infinity();
  Eigen::Vector3d a1;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d v = es.eigenvectors().col(i).real();
    const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
    if (cond > 0.0 && (best < 0 || std::abs(es.eigenvalues()(i).real()) < best_cond)) {
      best = i;
      best_cond = std::abs(es.eigenvalues()(i).real());
      a1 = v;
    }
  }
  if (best < 0) throw DegenerateGeometry("no elliptical solution");
  const Eigen::Vector3d a2 = t * a1;

  // Undo the scaling x' = s (x - mx), y' = s (y - my).
  const double A = a1(0) * s * s, B = a1(1) * s * s, C = a1(2) * s * s;
  const double D = a2(0) * s, E = a2(1) * s, F = a2(2);
  const double mx = mean.x, my = mean.y;
  Conic q;
  q.a = A;
  q.b = B;
  q.c = C;
  q.d = D - 2.0 * A * mx - B * my;
  q.e = E - 2.0 * C * my - B * mx;
  q.f = A * mx * mx + B * mx * my + C * my * my - D * mx - E * my + F;
  const double norm_ac = q.a + q.c;
  if (norm_ac == 0.0) throw DegenerateGeometry("no elliptical solution");
  q.a /= norm_ac;
  q.b /= norm_ac;
  q.c /= norm_ac;
  q.d /= norm_ac;
  q.e /= norm_ac;
  q.f /= norm_ac;
  return q;
}

EllipseModel fit_ellipse(std::span<const Vec2> points) { return conic_to_ellipse(fit_conic(points)); }

double sampson_distance(const Conic& q, Vec2 p) {
  const double g = norm(q.gradient(p));
  const double v = std::abs(q(p));
  if (g == 0.0) return v == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return v / g;
}

double contour_distance(const EllipseModel& e, Vec2 p, int samples) {
  const std::vector<Vec2> pts = sample_contour(e, samples);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    best = std::min(best, point_segment_distance(p, pts[i], pts[(i + 1) % pts.size()]));
  return best;
}

}  // namespace blastomere
