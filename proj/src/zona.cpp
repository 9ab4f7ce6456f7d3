#include "blastomere/zona.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blastomere/ellipse_fit.hpp"
#include "blastomere/error.hpp"

namespace blastomere {

double mean_radius(const EllipseModel& e) {
  double sum = 0.0;
  const std::vector<Vec2> pts = sample_contour(e, 360);
  for (Vec2 p : pts) sum += norm(p - e.center);
  return sum / static_cast<double>(pts.size());
}

ZpModel make_zp(const EllipseModel& e) {
  ZpModel zp;
  zp.ellipse = canonical(e);
  zp.mean_radius = mean_radius(zp.ellipse);
  return zp;
}

std::vector<Vec2> beam_samples(std::span<const EdgeCluster> clusters, Vec2 origin, int width, int height,
                               int beams) {
  const EdgeMap mask = rasterize_clusters(clusters, width, height);
  std::vector<Vec2> out;
  const double reach = std::hypot(width, height);
  for (int k = 0; k < beams; ++k) {
    const double t = 2.0 * std::numbers::pi * k / beams;
    const Vec2 dir{std::cos(t), std::sin(t)};
    std::optional<Pixel> last;
    for (double r = 0.0; r <= reach; r += 0.5) {
      const Vec2 p = origin + dir * r;
      const Pixel q{static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
      if (!mask.contains(q)) {
        if (r > 0.0) break;
        continue;
      }
      if (mask[q]) last = q;
    }
    if (last) out.push_back(to_vec(*last));
  }
  return out;
}

ZpModel estimate_inner_zp(std::span<const EdgeCluster> clusters, Vec2 img_center, int width, int height,
                          const ZonaParams& params) {
  std::size_t vertex_count = 0;
  for (const EdgeCluster& c : clusters) vertex_count += c.vertices.size();
  if (vertex_count < 5) throw NoZonaFound("fewer than 5 cluster vertices");

  const Vec2 origin = params.center.value_or(img_center);
  std::vector<Vec2> samples = beam_samples(clusters, origin, width, height, params.beams);
  if (samples.size() < 5) throw NoZonaFound("fewer than 5 beam hits");

  Conic q;
  try {
    q = fit_conic(samples);
    for (int round = 0; round < params.max_rounds; ++round) {
      std::vector<double> res;
      res.reserve(samples.size());
      for (Vec2 p : samples) res.push_back(sampson_distance(q, p));
      std::vector<double> sorted = res;
      std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
      const double median = sorted[sorted.size() / 2];
      const double cut = std::max(params.reject_factor * median, params.min_reject_residual);
      std::vector<Vec2> kept;
      for (std::size_t i = 0; i < samples.size(); ++i)
        if (res[i] <= cut) kept.push_back(samples[i]);
      if (kept.size() == samples.size()) break;
      if (kept.size() < 5) throw NoZonaFound("fewer than 5 samples survive outlier rejection");
      samples = std::move(kept);
      q = fit_conic(samples);
    }
    return make_zp(conic_to_ellipse(q));
  } catch (const DegenerateGeometry& e) {
    throw NoZonaFound(std::string("zona fit failed: ") + e.what());
  }
}

ZpModel fallback_zp(int width, int height) {
  EllipseModel e;
  e.center = {(width - 1) / 2.0, (height - 1) / 2.0};
  e.a = (width - 1) / 2.0;
  e.b = (height - 1) / 2.0;
  e.phi = 0.0;
  ZpModel zp = make_zp(e);
  zp.fallback = true;
  return zp;
}

bool is_zp_cluster(const EdgeCluster& cluster, const ZpModel& zp, const ZonaParams& params) {
  const double vtol = params.vertex_tol * zp.mean_radius;
  for (Vec2 v : cluster.vertices)
    if (contour_distance(zp.ellipse, v) > vtol) return false;
  if (cluster.centroid && norm(*cluster.centroid - zp.ellipse.center) > params.centroid_tol * zp.mean_radius)
    return false;
  return true;
}

std::vector<EdgeCluster> remove_zp_clusters(std::span<const EdgeCluster> clusters, const ZpModel& zp,
                                            const ZonaParams& params) {
  std::vector<EdgeCluster> out;
  for (const EdgeCluster& c : clusters) {
    const bool outside = std::all_of(c.pixels.begin(), c.pixels.end(),
                                     [&](Pixel p) { return implicit_value(zp.ellipse, to_vec(p)) > 1.0; });
    if (outside || is_zp_cluster(c, zp, params)) continue;
    out.push_back(c);
  }
  return out;
}

void apply_border_margin(EdgeMap& edges, double margin) {
  if (margin <= 0.0) return;
  const Vec2 c{(edges.width() - 1) / 2.0, (edges.height() - 1) / 2.0};
  const double limit = std::min(edges.width(), edges.height()) / 2.0 - margin;
  for (int y = 0; y < edges.height(); ++y)
    for (int x = 0; x < edges.width(); ++x)
      if (norm(Vec2{static_cast<double>(x), static_cast<double>(y)} - c) > limit) edges(x, y) = 0;
}

}  // namespace blastomere
