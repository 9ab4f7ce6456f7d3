#include "blastomere/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "blastomere/error.hpp"

namespace blastomere {

double wrap_half_turn(double a) {
  a = std::fmod(a, std::numbers::pi);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

double undirected_angle_diff(double a, double b) {
  const double d = wrap_half_turn(a - b);
  return std::min(d, std::numbers::pi - d);
}

EllipseModel canonical(EllipseModel e) {
  if (e.b > e.a) {
    std::swap(e.a, e.b);
    e.phi += 0.5 * std::numbers::pi;
  }
  e.phi = wrap_half_turn(e.phi);
  return e;
}

bool is_valid(const EllipseModel& e) {
  return std::isfinite(e.center.x) && std::isfinite(e.center.y) && e.b > 0.0 && e.a >= e.b && std::isfinite(e.a);
}

double area(const EllipseModel& e) { return std::numbers::pi * e.a * e.b; }

Conic ellipse_conic(const EllipseModel& e) {
  const double s = std::sin(e.phi);
  const double c = std::cos(e.phi);
  const double a2 = e.a * e.a;
  const double b2 = e.b * e.b;
  const double x0 = e.center.x;
  const double y0 = e.center.y;

  Conic q;
  q.a = a2 * s * s + b2 * c * c;
  q.b = 2.0 * (b2 - a2) * s * c;
  q.c = a2 * c * c + b2 * s * s;
  q.d = -2.0 * q.a * x0 - q.b * y0;
  q.e = -q.b * x0 - 2.0 * q.c * y0;
  q.f = q.a * x0 * x0 + q.b * x0 * y0 + q.c * y0 * y0 - a2 * b2;

  const double k = q.a + q.c;  // = a^2 + b^2 > 0
  q.a /= k;
  q.b /= k;
  q.c /= k;
  q.d /= k;
  q.e /= k;
  q.f /= k;
  return q;
}

EllipseModel conic_to_ellipse(const Conic& q) {
  const double disc = q.b * q.b - 4.0 * q.a * q.c;
  if (!(disc < 0.0)) throw DegenerateGeometry("conic is not an ellipse");

  // center solves the zero-gradient system
  const double x0 = (2.0 * q.c * q.d - q.b * q.e) / disc;
  const double y0 = (2.0 * q.a * q.e - q.b * q.d) / disc;
  // value at the center
  const double f0 = q.a * x0 * x0 + q.b * x0 * y0 + q.c * y0 * y0 + q.d * x0 + q.e * y0 + q.f;

  // eigen-decomposition of [[a, b/2], [b/2, c]]
  const double mean = 0.5 * (q.a + q.c);
  const double root = std::hypot(0.5 * (q.a - q.c), 0.5 * q.b);
  const double mu1 = mean - root;  // smaller eigenvalue -> major axis
  const double mu2 = mean + root;
  if (!(-f0 / mu1 > 0.0) || !(-f0 / mu2 > 0.0)) throw DegenerateGeometry("conic has no real points");

  EllipseModel e;
  e.center = {x0, y0};
  e.a = std::sqrt(-f0 / mu1);
  e.b = std::sqrt(-f0 / mu2);
  // eigenvector of mu1
  e.phi = 0.5 * std::atan2(q.b, q.a - q.c) + 0.5 * std::numbers::pi;
  return canonical(e);
}

Vec2 ellipse_point(const EllipseModel& e, double t) {
  const double c = std::cos(e.phi);
  const double s = std::sin(e.phi);
  const double u = e.a * std::cos(t);
  const double v = e.b * std::sin(t);
  return {e.center.x + c * u - s * v, e.center.y + s * u + c * v};
}

double implicit_value(const EllipseModel& e, Vec2 p) {
  const double c = std::cos(e.phi);
  const double s = std::sin(e.phi);
  const double dx = p.x - e.center.x;
  const double dy = p.y - e.center.y;
  const double u = (c * dx + s * dy) / e.a;
  const double v = (-s * dx + c * dy) / e.b;
  return u * u + v * v;
}

double perimeter(const EllipseModel& e) {
  // Ramanujan's second approximation
  const double h = std::pow(e.a - e.b, 2) / std::pow(e.a + e.b, 2);
  return std::numbers::pi * (e.a + e.b) * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
}

std::vector<Vec2> sample_contour(const EllipseModel& e, int n) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts.push_back(ellipse_point(e, 2.0 * std::numbers::pi * i / n));
  return pts;
}

std::vector<Vec2> sample_contour_arclength(const EllipseModel& e, double step) {
  const int dense = std::max(64, static_cast<int>(std::ceil(perimeter(e) * 4.0)));
  std::vector<Vec2> fine = sample_contour(e, dense);
  std::vector<double> cum(fine.size() + 1, 0.0);
  for (std::size_t i = 0; i < fine.size(); ++i) cum[i + 1] = cum[i] + norm(fine[(i + 1) % fine.size()] - fine[i]);
  const double total = cum.back();
  const int n = std::max(1, static_cast<int>(std::lround(total / step)));
  const double ds = total / n;

  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  std::size_t j = 0;
  for (int i = 0; i < n; ++i) {
    const double target = i * ds;
    while (j + 1 < fine.size() && cum[j + 1] < target) ++j;
    const double seg = cum[j + 1] - cum[j];
    const double f = seg > 0.0 ? (target - cum[j]) / seg : 0.0;
    const Vec2 p0 = fine[j];
    const Vec2 p1 = fine[(j + 1) % fine.size()];
    out.push_back(p0 + f * (p1 - p0));
  }
  return out;
}

std::vector<Pixel> contour_pixels(const EllipseModel& e) {
  const int n = std::max(16, static_cast<int>(std::ceil(perimeter(e) * 3.0)));
  std::vector<Pixel> out;
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < n; ++i) {
    const Vec2 p = ellipse_point(e, 2.0 * std::numbers::pi * i / n);
    const Pixel q{static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
    if (seen.insert({q.x, q.y}).second) out.push_back(q);
  }
  return out;
}

std::vector<Pixel> contour_offsets(double a, double b, double phi) {
  const EllipseModel e{{0.0, 0.0}, a, b, phi};
  const int r = static_cast<int>(std::ceil(std::max(a, b))) + 1;
  const int side = 2 * r + 1;
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(side) * side, 0);
  const int n = std::max(16, static_cast<int>(std::ceil(perimeter(e) * 3.0)));
  for (int i = 0; i < n; ++i) {
    const Vec2 p = ellipse_point(e, 2.0 * std::numbers::pi * i / n);
    hit[static_cast<std::size_t>(std::lround(p.y) + r) * side + (std::lround(p.x) + r)] = 1;
  }
  std::vector<Pixel> out;
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      if (hit[static_cast<std::size_t>(y) * side + x]) out.push_back({x - r, y - r});
  return out;
}

Grid<std::uint8_t> fill_ellipse(const EllipseModel& e, int width, int height) {
  Grid<std::uint8_t> m(width, height, 0);
  const int x0 = std::max(0, static_cast<int>(std::floor(e.center.x - e.a - 1)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(e.center.x + e.a + 1)));
  const int y0 = std::max(0, static_cast<int>(std::floor(e.center.y - e.a - 1)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(e.center.y + e.a + 1)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (implicit_value(e, {static_cast<double>(x), static_cast<double>(y)}) <= 1.0) m(x, y) = 1;
  return m;
}

Grid<std::uint8_t> fill_polygon(const std::vector<Vec2>& polygon, int width, int height) {
  Grid<std::uint8_t> m(width, height, 0);
  const std::size_t n = polygon.size();
  if (n < 3) return m;
  std::vector<double> xs;
  for (int y = 0; y < height; ++y) {
    const double py = y;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = polygon[i];
      const Vec2 b = polygon[(i + 1) % n];
      // half-open rule so shared vertices count once
      if ((a.y <= py && b.y > py) || (b.y <= py && a.y > py)) xs.push_back(a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int xa = std::max(0, static_cast<int>(std::ceil(xs[k])));
      const int xb = std::min(width - 1, static_cast<int>(std::ceil(xs[k + 1])) - 1);
      for (int x = xa; x <= xb; ++x) m(x, y) = 1;
    }
  }
  return m;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

std::vector<Pixel> raster_line(Pixel a, Pixel b) {
  std::vector<Pixel> out;
  const int n = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
  for (int i = 0; i <= n; ++i) {
    const double t = n == 0 ? 0.0 : static_cast<double>(i) / n;
    out.push_back({static_cast<int>(std::lround(a.x + t * (b.x - a.x))), static_cast<int>(std::lround(a.y + t * (b.y - a.y)))});
  }
  return out;
}

}  // namespace blastomere
