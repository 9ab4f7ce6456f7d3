#include "blastomere/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "blastomere/error.hpp"

namespace blastomere {

SizeRegion admissible_region(const ZpModel& zp, int n) {
  if (n < 1 || n > 8) throw InvalidArgument("cell count must be in [1, 8]");
  const double ab = zp.ellipse.a * zp.ellipse.b;
  SizeRegion r;
  r.n = n;
  r.area_lo = 0.7 / n * ab;
  r.area_hi = std::min(1.0 / n + 0.15, 1.0) * ab;
  r.eta = n < 6 ? 1.6 : 1.3;
  return r;
}

namespace {

std::vector<std::pair<double, double>> grid_pairs(const SizeRegion& region, int na, int nb, double a_lo,
                                                  double a_hi, double b_lo, double b_hi) {
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < na; ++i) {
    const double a = na == 1 ? a_lo : a_lo + (a_hi - a_lo) * i / (na - 1);
    for (int j = 0; j < nb; ++j) {
      const double b = nb == 1 ? b_lo : b_lo + (b_hi - b_lo) * j / (nb - 1);
      if (region.admits(a, b)) out.emplace_back(a, b);
    }
  }
  if (out.empty()) throw InvalidArgument("no feasible axis pair on the grid");
  return out;
}

struct Bounds {
  double a_lo, a_hi, b_lo, b_hi;
};

Bounds feasible_box(const SizeRegion& r) {
  if (!(r.area_lo < r.area_hi) || !(r.eta > 1.0) || !(r.area_lo >= 0.0))
    throw InvalidArgument("invalid size region");
  return {std::sqrt(r.area_lo), std::sqrt(r.area_hi * r.eta), std::sqrt(r.area_lo / r.eta), std::sqrt(r.area_hi)};
}

}  // namespace

std::vector<std::pair<double, double>> enumerate_axes(const SizeRegion& region, int steps) {
  if (steps < 1) throw InvalidArgument("steps must be positive");
  const Bounds bx = feasible_box(region);
  return grid_pairs(region, steps, steps, bx.a_lo, bx.a_hi, bx.b_lo, bx.b_hi);
}

std::vector<std::pair<double, double>> enumerate_axes_spacing(const SizeRegion& region, double spacing) {
  if (!(spacing > 0.0)) throw InvalidArgument("axis spacing must be positive");
  const Bounds bx = feasible_box(region);
  const int na = static_cast<int>(std::floor((bx.a_hi - bx.a_lo) / spacing)) + 1;
  const int nb = static_cast<int>(std::floor((bx.b_hi - bx.b_lo) / spacing)) + 1;
  return grid_pairs(region, na, nb, bx.a_lo, bx.a_lo + (na - 1) * spacing, bx.b_lo, bx.b_lo + (nb - 1) * spacing);
}

int compare_correlation(const Hypothesis& x, const Hypothesis& y) {
  const long long l = x.hits * y.template_size;
  const long long r = y.hits * x.template_size;
  return l < r ? -1 : (l > r ? 1 : 0);
}

namespace {

// Scratch raster for building templates; cells are reset after each use.
class Marker {
 public:
  explicit Marker(int radius) : r_(radius), side_(2 * radius + 1), cells_(static_cast<std::size_t>(side_) * side_, 0) {}

  // Template from contour samples given relative to the centre.
  Template build(const std::vector<Vec2>& samples, std::vector<Vec2> ring) {
    Template t;
    for (Vec2 p : samples) {
      const Pixel q{static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
      if (mark(q, 1)) t.contour.push_back(q);
    }
    t.stroke = t.contour;
    for (Pixel p : t.contour)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (const Pixel q{p.x + dx, p.y + dy}; mark(q, 2)) t.stroke.push_back(q);
    for (std::size_t i : touched_) cells_[i] = 0;
    touched_.clear();
    t.ring = std::move(ring);
    return t;
  }

 private:
  bool mark(Pixel p, std::uint8_t v) {
    const std::size_t i = static_cast<std::size_t>(p.y + r_) * side_ + (p.x + r_);
    if (cells_[i]) return false;
    cells_[i] = v;
    touched_.push_back(i);
    return true;
  }

  int r_, side_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::size_t> touched_;
};

std::vector<Template> rotated_templates(double a, double b) {
  const int n = std::max(16, static_cast<int>(std::ceil(perimeter({{0.0, 0.0}, a, b, 0.0}) * 3.0)));
  std::vector<Vec2> base(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    base[static_cast<std::size_t>(i)] = {a * std::cos(t), b * std::sin(t)};
  }
  std::vector<Vec2> ring_base;
  for (int k = 0; k < 72; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 72.0;
    ring_base.push_back({a * std::cos(t), b * std::sin(t)});
  }
  Marker marker(static_cast<int>(std::ceil(std::max(a, b))) + 3);
  std::vector<Template> out;
  std::vector<Vec2> pts(base.size());
  for (int r = 0; r < kRotations; ++r) {
    const double phi = r * std::numbers::pi / kRotations;
    const double c = std::cos(phi), s = std::sin(phi);
    auto rot = [&](Vec2 p) { return Vec2{c * p.x - s * p.y, s * p.x + c * p.y}; };
    for (std::size_t i = 0; i < base.size(); ++i) pts[i] = rot(base[i]);
    std::vector<Vec2> ring;
    for (Vec2 p : ring_base) ring.push_back(rot(p));
    out.push_back(marker.build(pts, std::move(ring)));
  }
  return out;
}

}  // namespace

Template make_template(double a, double b, double phi) {
  const EllipseModel e{{0.0, 0.0}, a, b, phi};
  const int n = std::max(16, static_cast<int>(std::ceil(perimeter(e) * 3.0)));
  std::vector<Vec2> samples;
  for (int i = 0; i < n; ++i) samples.push_back(ellipse_point(e, 2.0 * std::numbers::pi * i / n));
  std::vector<Vec2> ring;
  for (int k = 0; k < 72; ++k) ring.push_back(ellipse_point(e, 2.0 * std::numbers::pi * k / 72.0));
  return Marker(static_cast<int>(std::ceil(std::max(a, b))) + 3).build(samples, std::move(ring));
}

const std::vector<Template>& TemplateBank::get(double a, double b) {
  auto it = cache_.find({a, b});
  if (it != cache_.end()) return it->second;
  return cache_.emplace(std::make_pair(a, b), rotated_templates(a, b)).first->second;
}

namespace {

// implicit_value with the trigonometry hoisted out.
struct EllipseFrame {
  Vec2 c;
  double cs, sn, ia2, ib2;
  explicit EllipseFrame(const EllipseModel& e)
      : c(e.center), cs(std::cos(e.phi)), sn(std::sin(e.phi)), ia2(1.0 / (e.a * e.a)), ib2(1.0 / (e.b * e.b)) {}
  double operator()(Vec2 p) const {
    const double dx = p.x - c.x, dy = p.y - c.y;
    const double u = cs * dx + sn * dy;
    const double v = -sn * dx + cs * dy;
    return u * u * ia2 + v * v * ib2;
  }
};

bool ring_inside(const EllipseFrame& zone, Vec2 center, const std::vector<Vec2>& ring) {
  for (Vec2 o : ring)
    if (zone(center + o) > 1.0) return false;
  return true;
}

}  // namespace

bool inside_zona(const EllipseModel& e, const ZpModel& zp) {
  std::vector<Vec2> ring;
  for (int k = 0; k < 72; ++k) ring.push_back(ellipse_point({{0.0, 0.0}, e.a, e.b, e.phi}, 2.0 * std::numbers::pi * k / 72.0));
  return ring_inside(EllipseFrame(zp.ellipse), e.center, ring);
}

PlacementSearch::PlacementSearch(const EdgeMap& edges, const ZpModel& zp, TemplateBank* bank)
    : zp_(zp), bank_(bank ? bank : &own_bank_) {
  const EllipseModel& z = zp.ellipse;
  const double c = std::cos(z.phi), s = std::sin(z.phi);
  const double hx = std::sqrt(z.a * z.a * c * c + z.b * z.b * s * s);
  const double hy = std::sqrt(z.a * z.a * s * s + z.b * z.b * c * c);
  x0_ = std::max(0, static_cast<int>(std::floor(z.center.x - hx)) - 3);
  y0_ = std::max(0, static_cast<int>(std::floor(z.center.y - hy)) - 3);
  const int x1 = std::min(edges.width() - 1, static_cast<int>(std::ceil(z.center.x + hx)) + 3);
  const int y1 = std::min(edges.height() - 1, static_cast<int>(std::ceil(z.center.y + hy)) + 3);
  w_ = x1 - x0_ + 1;
  h_ = y1 - y0_ + 1;
  if (w_ <= 0 || h_ <= 0) return;
  Grid<std::uint8_t> roi(w_, h_, 0);
  for (int y = 0; y < h_; ++y)
    for (int x = 0; x < w_; ++x) roi(x, y) = edges(x + x0_, y + y0_) ? 1 : 0;
  corr_.emplace(roi, w_, h_, true);
}

std::optional<Hypothesis> PlacementSearch::best(double a, double b) {
  if (!corr_) return std::nullopt;
  const EllipseModel& z = zp_.ellipse;
  // Centres of contained placements lie inside this shrunken ellipse.
  const EllipseModel shrunk{z.center, z.a - b, z.b - b, z.phi};
  if (!(shrunk.a > 0.0) || !(shrunk.b > 0.0)) return std::nullopt;

  const EllipseFrame zone(z);
  const EllipseFrame centres(shrunk);
  const std::vector<Template>& templates = bank_->get(a, b);
  std::optional<Hypothesis> best;
  for (int r = 0; r < kRotations; ++r) {
    const double phi = r * std::numbers::pi / kRotations;
    const Template& t = templates[static_cast<std::size_t>(r)];
    const FftCorrelator::View c = corr_->correlate_view(t.stroke);
    const long long tsize = static_cast<long long>(t.contour.size());
    // raw values below `floor_raw` cannot beat the current best
    double floor_raw = -1.0;
    if (best) floor_raw = (static_cast<double>(best->hits) * tsize / best->template_size - 0.75) / c.scale;
    for (int y = 0; y < h_; ++y) {
      const double* row = c.data + static_cast<std::size_t>(y) * c.stride;
      for (int x = 0; x < w_; ++x) {
        if (row[x] < floor_raw) continue;
        const long long hits = c.rounded(x, y);
        if (best && hits * best->template_size <= best->hits * tsize) continue;
        const Vec2 center{static_cast<double>(x + x0_), static_cast<double>(y + y0_)};
        if (centres(center) > 1.0) continue;
        if (!ring_inside(zone, center, t.ring)) continue;
        const EllipseModel e{center, a, b, phi};
        Hypothesis h;
        h.ellipse = e;
        h.hits = hits;
        h.template_size = tsize;
        h.correlation_score = static_cast<double>(hits) / static_cast<double>(tsize);
        h.rotation_index = r;
        best = h;
        floor_raw = (static_cast<double>(best->hits) * tsize / best->template_size - 0.75) / c.scale;
      }
    }
  }
  return best;
}

Hypothesis best_placement(const EllipseModel& tpl, const EdgeMap& edges, const ZpModel& zp) {
  PlacementSearch search(edges, zp);
  auto h = search.best(tpl.a, tpl.b);
  if (!h) throw NoPlacement("template does not fit inside the zona");
  return *h;
}

EdgeMap remove_matched_edges(const EdgeMap& edges, const EllipseModel& e, const NormalField& normals, double tol) {
  if (tol < 0.0) throw InvalidArgument("tolerance must be non-negative");
  EdgeMap out = edges;
  const Conic q = ellipse_conic(e);
  const std::vector<Vec2> samples = sample_contour_arclength(e, 0.5);
  const double reach = e.a + tol + 1.0;
  const int x0 = std::max(0, static_cast<int>(std::floor(e.center.x - reach)));
  const int x1 = std::min(edges.width() - 1, static_cast<int>(std::ceil(e.center.x + reach)));
  const int y0 = std::max(0, static_cast<int>(std::floor(e.center.y - reach)));
  const int y1 = std::min(edges.height() - 1, static_cast<int>(std::ceil(e.center.y + reach)));
  const double inner = std::max(0.0, e.b - tol - 1.0);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      if (!edges(x, y)) continue;
      const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
      if (norm(p - e.center) < inner) continue;
      double best = std::numeric_limits<double>::infinity();
      Vec2 nearest{};
      for (Vec2 s : samples) {
        const double d = norm(p - s);
        if (d < best) {
          best = d;
          nearest = s;
        }
      }
      if (best > tol) continue;
      const auto img = normals.at({x, y});
      if (!img) continue;
      if (undirected_angle_diff(*img, model_normal_at(q, nearest)) < std::numbers::pi / 16.0) out(x, y) = 0;
    }
  return out;
}

}  // namespace blastomere
