#include "blastomere/image.hpp"

#include <cmath>

#include "blastomere/error.hpp"

namespace blastomere {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

GrayImage gaussian_smooth(const GrayImage& img, double sigma) {
  const std::vector<double> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = img.width();
  const int h = img.height();

  GrayImage rows(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[static_cast<std::size_t>(i + radius)] * img.clamped(x + i, y);
      rows(x, y) = acc;
    }
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[static_cast<std::size_t>(i + radius)] * rows.clamped(x, y + i);
      out(x, y) = acc;
    }
  }
  return out;
}

GradientField gradient(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  if (w < 3 || h < 3) throw InvalidArgument("gradient needs an image of at least 3x3 pixels");

  GradientField g{Grid<double>(w, h), Grid<double>(w, h), Grid<double>(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double dx;
      if (x == 0) dx = img(1, y) - img(0, y);
      else if (x == w - 1) dx = img(w - 1, y) - img(w - 2, y);
      else dx = 0.5 * (img(x + 1, y) - img(x - 1, y));

      double dy;
      if (y == 0) dy = img(x, 1) - img(x, 0);
      else if (y == h - 1) dy = img(x, h - 1) - img(x, h - 2);
      else dy = 0.5 * (img(x, y + 1) - img(x, y - 1));

      g.gx(x, y) = dx;
      g.gy(x, y) = dy;
      g.magnitude(x, y) = std::sqrt(dx * dx + dy * dy);
    }
  }
  return g;
}

}  // namespace blastomere
