#include "blastomere/normals.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "blastomere/error.hpp"

namespace blastomere {

double model_normal_at(const Conic& conic, Vec2 p) {
  const Vec2 g = conic.gradient(p);
  if (g.x == 0.0 && g.y == 0.0) throw DegenerateGeometry("conic gradient vanishes");
  return wrap_half_turn(std::atan2(g.y, g.x));
}

namespace {

std::optional<double> window_direction(const GradientField& grad, int cx, int cy, double floor) {
  double sx = 0.0, sy = 0.0, total = 0.0;
  for (int y = cy - 2; y <= cy + 2; ++y)
    for (int x = cx - 2; x <= cx + 2; ++x) {
      const double gx = grad.gx(x, y);
      const double gy = grad.gy(x, y);
      const double m = grad.magnitude(x, y);
      total += m;
      if (m > 0.0) {
        sx += (gx * gx - gy * gy) / m;
        sy += 2.0 * gx * gy / m;
      }
    }
  if (total < floor) return std::nullopt;
  if (std::hypot(sx, sy) <= 1e-12 * total) return std::nullopt;
  return wrap_half_turn(0.5 * std::atan2(sy, sx));
}

}  // namespace

std::optional<double> image_normal_at(const GradientField& grad, Pixel p, double floor) {
  if (p.x < 2 || p.y < 2 || p.x + 2 >= grad.gx.width() || p.y + 2 >= grad.gx.height())
    throw InvalidArgument("normal window leaves the image");
  return window_direction(grad, p.x, p.y, floor);
}

NormalField::NormalField(const GradientField& grad, double floor)
    : dir_(grad.gx.width(), grad.gx.height(), std::numeric_limits<double>::quiet_NaN()) {
  for (int y = 2; y + 2 < dir_.height(); ++y)
    for (int x = 2; x + 2 < dir_.width(); ++x)
      if (auto d = window_direction(grad, x, y, floor)) dir_(x, y) = *d;
}

std::optional<double> NormalField::at(Pixel p) const {
  if (!dir_.contains(p)) return std::nullopt;
  const double d = dir_[p];
  if (std::isnan(d)) return std::nullopt;
  return d;
}

GradientField normal_gradient(const GrayImage& img) { return gradient(gaussian_smooth(img, 1.0)); }

}  // namespace blastomere
