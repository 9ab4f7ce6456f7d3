#pragma once

// Independent brute-force references used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "blastomere/clustering.hpp"
#include "blastomere/evaluation.hpp"
#include "blastomere/geometry.hpp"
#include "blastomere/synth.hpp"
#include "blastomere/vesselness.hpp"

namespace oracle {

using namespace blastomere;

// Fewest segments covering the chain such that every point lies within eps of
// the segment spanning it (vertices restricted to chain points).
inline std::size_t min_segments(const std::vector<Vec2>& pts, double eps) {
  const std::size_t n = pts.size();
  auto ok = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = i + 1; k < j; ++k)
      if (point_segment_distance(pts[k], pts[i], pts[j]) > eps + 1e-9) return false;
    return true;
  };
  const std::size_t inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> best(n, inf);
  best[0] = 0;
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (best[i] != inf && best[i] + 1 < best[j] && ok(i, j)) best[j] = best[i] + 1;
  return best[n - 1];
}

// Largest distance from a chain point to the polyline segment that spans it.
inline double polyline_deviation(const PixelChain& chain, const std::vector<std::size_t>& idx) {
  std::vector<Vec2> pts;
  for (Pixel p : chain.points) pts.push_back(to_vec(p));
  if (chain.closed) pts.push_back(pts.front());
  double worst = 0.0;
  for (std::size_t s = 0; s + 1 < idx.size(); ++s)
    for (std::size_t k = idx[s]; k <= idx[s + 1]; ++k)
      worst = std::max(worst, point_segment_distance(pts[k], pts[idx[s]], pts[idx[s + 1]]));
  return worst;
}

// Flood-fill component sizes, in scanline discovery order.
inline std::vector<int> component_sizes(const Grid<std::uint8_t>& m) {
  Grid<int> seen(m.width(), m.height(), 0);
  std::vector<int> sizes;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y) || seen(x, y)) continue;
      std::vector<Pixel> stack{{x, y}};
      seen(x, y) = 1;
      int count = 0;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        ++count;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int qx = p.x + dx, qy = p.y + dy;
            if (m.contains(qx, qy) && m(qx, qy) && !seen(qx, qy)) {
              seen(qx, qy) = 1;
              stack.push_back({qx, qy});
            }
          }
      }
      sizes.push_back(count);
    }
  return sizes;
}

// Best one-to-one total over all injective assignments, counting only positive scores.
inline double exhaustive_assignment(const std::vector<std::vector<double>>& score) {
  const std::size_t rows = score.size();
  const std::size_t cols = rows ? score[0].size() : 0;
  // permute the larger side, pad with "unmatched" slots
  const std::size_t m = std::max(rows, cols);
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < rows; ++i)
      if (perm[i] < cols && score[i][perm[i]] > 0.0) total += score[i][perm[i]];
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline Grid<std::uint8_t> random_mask(Rng& rng, int w, int h, double density) {
  Grid<std::uint8_t> m(w, h, 0);
  for (auto& v : m.values()) v = rng.uniform() < density ? 1 : 0;
  return m;
}

// Edge map of an ellipse outline, one pixel per dense contour sample.
inline EdgeMap render_contour(const EllipseModel& e, int w, int h) {
  EdgeMap m(w, h, 0);
  for (Pixel p : contour_pixels(e))
    if (m.contains(p)) m[p] = 1;
  return m;
}

// Circular arc rasterized by rounding dense samples.
inline EdgeMap render_arc(Vec2 c, double r, double t0, double span, int w, int h) {
  EdgeMap m(w, h, 0);
  const int n = static_cast<int>(std::ceil(r * span * 4.0)) + 2;
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + span * i / n;
    const Pixel p{static_cast<int>(std::lround(c.x + r * std::cos(t))), static_cast<int>(std::lround(c.y + r * std::sin(t)))};
    if (m.contains(p)) m[p] = 1;
  }
  return m;
}

inline std::vector<Vec2> arc_vertices(Vec2 c, double r, double t0, double span, int n) {
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + span * i / (n - 1);
    v.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
  }
  return v;
}


// Image of a bright Gaussian rim (sigma 1.2 px) along the ellipse contour.
inline GrayImage render_rim(const std::vector<EllipseModel>& ellipses, int w, int h) {
  GrayImage img(w, h, 0.2);
  for (const EllipseModel& e : ellipses) {
    const Conic q = ellipse_conic(e);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const Vec2 p{double(x), double(y)};
        const double g = norm(q.gradient(p));
        if (g == 0.0) continue;
        const double d = q(p) / g;
        if (std::abs(d) > 6.0) continue;
        img(x, y) = std::max(img(x, y), 0.2 + 0.6 * std::exp(-d * d / (2.0 * 1.2 * 1.2)));
      }
  }
  return img;
}

}  // namespace oracle
