#include "blastomere/detector.hpp"

#include <algorithm>
#include <cmath>

#include "blastomere/error.hpp"

namespace blastomere {

double compliance_score(const EllipseModel& e, const EdgeMap& edges, const NormalField& normals,
                        const ComplianceParams& params) {
  const std::vector<Vec2> samples = sample_contour_arclength(e, 1.0);
  if (samples.empty()) return 0.0;
  const Conic q = ellipse_conic(e);
  const int slack = static_cast<int>(std::floor(params.search_slack));
  auto pixel_at = [](Vec2 p) { return Pixel{static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))}; };

  std::size_t matched = 0;
  for (Vec2 s : samples) {
    Vec2 g = q.gradient(s);
    const double gl = norm(g);
    if (gl == 0.0) continue;
    g = g * (1.0 / gl);
    std::optional<Pixel> hit;
    if (edges.edge(pixel_at(s))) hit = pixel_at(s);
    for (int k = 1; k <= slack && !hit; ++k) {
      if (const Pixel p = pixel_at(s + g * k); edges.edge(p)) hit = p;
      else if (const Pixel p2 = pixel_at(s - g * k); edges.edge(p2)) hit = p2;
    }
    if (!hit) continue;
    const auto img = normals.at(*hit);
    if (!img) continue;
    if (undirected_angle_diff(*img, wrap_half_turn(std::atan2(g.y, g.x))) < params.angle_gate) ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(samples.size());
}

PipelineStages prepare_edges(const GrayImage& img, const Config& cfg, ZpModel& zp) {
  PipelineStages st;
  VesselnessParams vp;
  vp.alpha = cfg.vesselness_alpha;
  vp.beta = cfg.vesselness_beta;
  const VesselnessResponse resp = multiscale_vesselness(img, cfg.sigma_min, cfg.sigma_max, cfg.n_scales, vp);
  EdgeMap edges = edge_map(resp, cfg.hysteresis_low, cfg.hysteresis_high);
  edges = thin_edges(edges);
  edges = clean_small_segments(edges, cfg.min_segment_len);
  st.raw_edges = edges;

  st.clusters = co_associate(build_clusters(edges, cfg.epsilon), cfg.coassoc);
  const Vec2 center{(img.width() - 1) / 2.0, (img.height() - 1) / 2.0};
  try {
    zp = estimate_inner_zp(st.clusters, center, img.width(), img.height(), cfg.zona);
  } catch (const NoZonaFound&) {
    if (!cfg.zp_fallback) throw;
    zp = fallback_zp(img.width(), img.height());
  }
  st.interior = remove_zp_clusters(st.clusters, zp, cfg.zona);
  st.working_edges = rasterize_clusters(st.interior, img.width(), img.height());
  apply_border_margin(st.working_edges, cfg.border_margin);
  return st;
}

namespace {

bool scanline_before(Vec2 a, Vec2 b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }

}  // namespace

DetectionResult detect_blastomeres(const GrayImage& img, int n, const Config& cfg) {
  if (n < 1 || n > 8) throw InvalidArgument("cell count must be in [1, 8]");
  DetectionResult result;
  result.n_requested = n;
  result.stages = prepare_edges(img, cfg, result.zp);

  const NormalField normals(normal_gradient(img), cfg.normal_floor);
  const SizeRegion region = admissible_region(result.zp, n);
  std::vector<std::pair<double, double>> sizes;
  try {
    sizes = cfg.axis_steps > 0 ? enumerate_axes(region, cfg.axis_steps) : enumerate_axes_spacing(region, cfg.axis_spacing);
  } catch (const InvalidArgument&) {
    sizes.clear();
  }

  const ComplianceParams cp{cfg.search_slack, cfg.angle_gate};
  const std::size_t top_k = static_cast<std::size_t>(std::max(cfg.top_k, 1));
  EdgeMap working = result.stages.working_edges;
  TemplateBank bank;

  // Best placement per size. Edges are only ever removed, so a stale score is
  // an upper bound on the current one and sizes whose bound cannot reach the
  // shortlist need not be searched again.
  std::vector<std::optional<Hypothesis>> per_size(sizes.size());
  auto before = [&](std::size_t i, std::size_t j) {
    const int c = compare_correlation(*per_size[i], *per_size[j]);
    return c != 0 ? c > 0 : i < j;
  };

  for (int iter = 0; iter < n && !sizes.empty(); ++iter) {
    PlacementSearch search(working, result.zp, &bank);
    std::vector<std::size_t> fresh;
    if (iter == 0 || !cfg.lazy_search) {
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        per_size[i] = search.best(sizes[i].first, sizes[i].second);
        if (per_size[i]) fresh.push_back(i);
      }
    } else {
      std::vector<std::size_t> order;
      for (std::size_t i = 0; i < sizes.size(); ++i)
        if (per_size[i]) order.push_back(i);
      std::stable_sort(order.begin(), order.end(), before);
      for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        if (fresh.size() >= top_k) {
          std::sort(fresh.begin(), fresh.end(), before);
          fresh.resize(top_k);
          // per_size[i] still holds its bound; stop once it is below the k-th exact score
          if (compare_correlation(*per_size[i], *per_size[fresh.back()]) < 0) break;
        }
        per_size[i] = search.best(sizes[i].first, sizes[i].second);
        if (per_size[i]) fresh.push_back(i);
      }
    }
    if (fresh.empty()) break;
    std::sort(fresh.begin(), fresh.end(), before);
    if (fresh.size() > top_k) fresh.resize(top_k);

    std::vector<Hypothesis> hyps;
    for (std::size_t i : fresh) hyps.push_back(*per_size[i]);
    const Hypothesis* best = nullptr;
    for (Hypothesis& h : hyps) {
      h.compliance_score = compliance_score(h.ellipse, working, normals, cp);
      if (!best || h.compliance_score > best->compliance_score) {
        best = &h;
        continue;
      }
      if (h.compliance_score < best->compliance_score) continue;
      const int c = compare_correlation(h, *best);
      if (c > 0 || (c == 0 && scanline_before(h.ellipse.center, best->ellipse.center))) best = &h;
    }
    if (best->compliance_score < cfg.compliance_floor) break;
    result.detections.push_back(*best);
    working = remove_matched_edges(working, best->ellipse, normals, cfg.removal_tol);
  }
  result.residual_edges = std::move(working);
  return result;
}

}  // namespace blastomere
