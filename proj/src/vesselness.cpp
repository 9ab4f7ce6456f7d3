#include "blastomere/vesselness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blastomere/error.hpp"

namespace blastomere {

namespace {

constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

double wrap_pi(double a) {
  a = std::fmod(a, std::numbers::pi);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

double bilinear(const Grid<double>& g, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = g.clamped(x0, y0);
  const double v10 = g.clamped(x0 + 1, y0);
  const double v01 = g.clamped(x0, y0 + 1);
  const double v11 = g.clamped(x0 + 1, y0 + 1);
  return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

}  // namespace

std::size_t EdgeMap::count() const {
  return static_cast<std::size_t>(std::count_if(values().begin(), values().end(), [](std::uint8_t v) { return v != 0; }));
}

std::vector<Pixel> EdgeMap::pixels() const {
  std::vector<Pixel> out;
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x)
      if ((*this)(x, y)) out.push_back({x, y});
  return out;
}

HessianEigenField hessian_eigen(const GrayImage& img, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("hessian sigma must be positive");
  const GrayImage s = gaussian_smooth(img, sigma);
  const int w = img.width();
  const int h = img.height();
  const double scale = sigma * sigma;

  HessianEigenField f{Grid<double>(w, h), Grid<double>(w, h), Grid<double>(w, h), sigma};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double c = s(x, y);
      const double dxx = scale * (s.clamped(x + 1, y) - 2.0 * c + s.clamped(x - 1, y));
      const double dyy = scale * (s.clamped(x, y + 1) - 2.0 * c + s.clamped(x, y - 1));
      const double dxy = scale * 0.25 *
                         (s.clamped(x + 1, y + 1) - s.clamped(x - 1, y + 1) - s.clamped(x + 1, y - 1) +
                          s.clamped(x - 1, y - 1));

      const double mean = 0.5 * (dxx + dyy);
      const double half_diff = 0.5 * (dxx - dyy);
      const double root = std::hypot(half_diff, dxy);
      const double mu_hi = mean + root;
      const double mu_lo = mean - root;
      // eigenvector of mu_hi points along 0.5 * atan2(2 dxy, dxx - dyy)
      const double angle_hi = 0.5 * std::atan2(2.0 * dxy, dxx - dyy);

      if (std::abs(mu_hi) <= std::abs(mu_lo)) {
        f.lambda1(x, y) = mu_hi;
        f.lambda2(x, y) = mu_lo;
        f.theta(x, y) = wrap_pi(angle_hi + 0.5 * std::numbers::pi);
      } else {
        f.lambda1(x, y) = mu_lo;
        f.lambda2(x, y) = mu_hi;
        f.theta(x, y) = wrap_pi(angle_hi);
      }
    }
  }
  return f;
}

double max_structureness(const HessianEigenField& field) {
  double best = 0.0;
  auto l1 = field.lambda1.values();
  auto l2 = field.lambda2.values();
  for (std::size_t i = 0; i < l1.size(); ++i) best = std::max(best, std::hypot(l1[i], l2[i]));
  return best;
}

VesselnessResponse vesselness_at_scale(const HessianEigenField& field, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("vesselness alpha and beta must be positive");
  const int w = field.lambda1.width();
  const int h = field.lambda1.height();
  VesselnessResponse r{Grid<double>(w, h), field.theta, Grid<double>(w, h, field.sigma)};
  auto l1 = field.lambda1.values();
  auto l2 = field.lambda2.values();
  auto v = r.v.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (l2[i] >= 0.0) {
      // lambda2 > 0 is the dark-ridge case; lambda2 == 0 implies S == 0
      v[i] = 0.0;
      continue;
    }
    const double rb = l1[i] / l2[i];
    const double s2 = l1[i] * l1[i] + l2[i] * l2[i];
    v[i] = std::exp(-rb * rb / (2.0 * alpha * alpha)) * (1.0 - std::exp(-s2 / (2.0 * beta * beta)));
  }
  return r;
}

std::vector<double> scale_ladder(double sigma_min, double sigma_max, int n_scales) {
  if (!(sigma_min > 0.0) || sigma_max < sigma_min || n_scales < 1)
    throw InvalidArgument("invalid scale range");
  std::vector<double> ladder;
  if (n_scales == 1) return {sigma_min};
  const double ratio = std::pow(sigma_max / sigma_min, 1.0 / (n_scales - 1));
  for (int i = 0; i < n_scales; ++i) ladder.push_back(i + 1 == n_scales ? sigma_max : sigma_min * std::pow(ratio, i));
  return ladder;
}

VesselnessResponse multiscale_vesselness(const GrayImage& img, double sigma_min, double sigma_max, int n_scales,
                                         VesselnessParams params) {
  const std::vector<double> ladder = scale_ladder(sigma_min, sigma_max, n_scales);
  std::vector<HessianEigenField> fields;
  fields.reserve(ladder.size());
  for (double s : ladder) fields.push_back(hessian_eigen(img, s));

  double beta = params.beta;
  if (beta <= 0.0) {
    double smax = 0.0;
    for (const auto& f : fields) smax = std::max(smax, max_structureness(f));
    beta = smax > 0.0 ? 0.5 * smax : 1.0;
  }

  VesselnessResponse best = vesselness_at_scale(fields.front(), params.alpha, beta);
  for (std::size_t k = 1; k < fields.size(); ++k) {
    const VesselnessResponse r = vesselness_at_scale(fields[k], params.alpha, beta);
    auto bv = best.v.values();
    auto rv = r.v.values();
    for (std::size_t i = 0; i < bv.size(); ++i) {
      if (rv[i] > bv[i]) {
        bv[i] = rv[i];
        best.orientation.values()[i] = r.orientation.values()[i];
        best.sigma_star.values()[i] = fields[k].sigma;
      }
    }
  }
  return best;
}

EdgeMap edge_map(const VesselnessResponse& resp, double low, double high) {
  if (!(low >= 0.0) || !(high <= 1.0) || low > high) throw InvalidArgument("hysteresis needs 0 <= low <= high <= 1");
  const int w = resp.v.width();
  const int h = resp.v.height();

  // non-maxima suppression along the ridge normal
  Grid<std::uint8_t> peak(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = resp.v(x, y);
      if (v <= 0.0) continue;
      const double t = resp.orientation(x, y);
      const double cx = std::cos(t);
      const double cy = std::sin(t);
      const double ahead = bilinear(resp.v, x + cx, y + cy);
      const double behind = bilinear(resp.v, x - cx, y - cy);
      if (v > ahead && v >= behind) peak(x, y) = 1;
    }
  }

  // hysteresis: seeds >= high, grow through peaks >= low
  EdgeMap out(w, h, 0);
  std::vector<Pixel> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!peak(x, y) || out(x, y) || resp.v(x, y) < high) continue;
      out(x, y) = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int k = 0; k < 8; ++k) {
          const int nx = p.x + kDx[k];
          const int ny = p.y + kDy[k];
          if (!out.contains(nx, ny) || out(nx, ny) || !peak(nx, ny) || resp.v(nx, ny) < low) continue;
          out(nx, ny) = 1;
          stack.push_back({nx, ny});
        }
      }
    }
  }
  return out;
}

EdgeMap thin_edges(const EdgeMap& edges) {
  EdgeMap out = edges;
  // neighbours in counter-clockwise order starting east (y grows downward)
  auto at = [&](int x, int y) -> int { return out.edge(x, y) ? 1 : 0; };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        if (!out(x, y)) continue;
        int n[8];
        int count = 0;
        for (int k = 0; k < 8; ++k) {
          n[k] = at(x + kDx[k], y + kDy[k]);
          count += n[k];
        }
        if (count < 2) continue;
        // Yokoi 8-connectivity number on the complemented neighbourhood
        int conn = 0;
        for (int k = 0; k < 8; k += 2) {
          const int a = 1 - n[k];
          const int b = 1 - n[(k + 1) % 8];
          const int c = 1 - n[(k + 2) % 8];
          conn += a - a * b * c;
        }
        if (conn != 1) continue;
        // only corners of 4-connected steps go; tips and diagonal runs stay
        bool corner = false;
        for (int k = 0; k < 8; k += 2) corner = corner || (n[k] && n[(k + 2) % 8]);
        if (!corner) continue;
        out(x, y) = 0;
        changed = true;
      }
    }
  }
  return out;
}

int label_components(const EdgeMap& edges, Grid<int>& labels) {
  labels = Grid<int>(edges.width(), edges.height(), 0);
  int next = 0;
  std::vector<Pixel> stack;
  for (int y = 0; y < edges.height(); ++y) {
    for (int x = 0; x < edges.width(); ++x) {
      if (!edges(x, y) || labels(x, y)) continue;
      ++next;
      labels(x, y) = next;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int k = 0; k < 8; ++k) {
          const int nx = p.x + kDx[k];
          const int ny = p.y + kDy[k];
          if (!edges.edge(nx, ny) || labels(nx, ny)) continue;
          labels(nx, ny) = next;
          stack.push_back({nx, ny});
        }
      }
    }
  }
  return next;
}

EdgeMap clean_small_segments(const EdgeMap& edges, int min_segment_len) {
  Grid<int> labels;
  const int n = label_components(edges, labels);
  std::vector<int> sizes(static_cast<std::size_t>(n) + 1, 0);
  for (int l : labels.values()) ++sizes[static_cast<std::size_t>(l)];
  EdgeMap out(edges.width(), edges.height(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int l = labels.values()[i];
    if (l > 0 && sizes[static_cast<std::size_t>(l)] >= min_segment_len) out.values()[i] = 1;
  }
  return out;
}

}  // namespace blastomere
