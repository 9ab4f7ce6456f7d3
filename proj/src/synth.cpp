#include "blastomere/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blastomere/error.hpp"

namespace blastomere {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Lattice value noise with smoothstep interpolation, summed over octaves.
class ValueNoise {
 public:
  explicit ValueNoise(std::uint64_t seed) : seed_(splitmix(seed)) {}

  double fbm(double x, double y, double base_period, int octaves = 4) const {
    double sum = 0.0, amp = 1.0, norm_sum = 0.0, f = 1.0 / base_period;
    for (int o = 0; o < octaves; ++o) {
      sum += amp * value(x * f, y * f, o);
      norm_sum += amp;
      amp *= 0.5;
      f *= 2.0;
    }
    return sum / norm_sum;
  }

 private:
  double lattice(long long ix, long long iy, int octave) const {
    std::uint64_t h = splitmix(seed_ ^ static_cast<std::uint64_t>(ix) * 0x100000001b3ULL);
    h = splitmix(h ^ static_cast<std::uint64_t>(iy) * 0xc2b2ae3d27d4eb4fULL ^ static_cast<std::uint64_t>(octave));
    return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }

  double value(double x, double y, int octave) const {
    const double fx = std::floor(x), fy = std::floor(y);
    const long long ix = static_cast<long long>(fx), iy = static_cast<long long>(fy);
    const double tx = x - fx, ty = y - fy;
    const double sx = tx * tx * (3.0 - 2.0 * tx), sy = ty * ty * (3.0 - 2.0 * ty);
    const double v00 = lattice(ix, iy, octave), v10 = lattice(ix + 1, iy, octave);
    const double v01 = lattice(ix, iy + 1, octave), v11 = lattice(ix + 1, iy + 1, octave);
    return (v00 * (1 - sx) + v10 * sx) * (1 - sy) + (v01 * (1 - sx) + v11 * sx) * sy;
  }

  std::uint64_t seed_;
};

struct Box {
  int x0, y0, x1, y1;
};

Box bounds(const EllipseModel& e, int width, int height, double pad) {
  const double c = std::cos(e.phi), s = std::sin(e.phi);
  const double hx = std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s) + pad;
  const double hy = std::sqrt(e.a * e.a * s * s + e.b * e.b * c * c) + pad;
  return {std::max(0, static_cast<int>(std::floor(e.center.x - hx))),
          std::max(0, static_cast<int>(std::floor(e.center.y - hy))),
          std::min(width - 1, static_cast<int>(std::ceil(e.center.x + hx))),
          std::min(height - 1, static_cast<int>(std::ceil(e.center.y + hy)))};
}

long long filled_count(const EllipseModel& e, int width, int height) {
  const Box b = bounds(e, width, height, 1.0);
  long long n = 0;
  for (int y = b.y0; y <= b.y1; ++y)
    for (int x = b.x0; x <= b.x1; ++x)
      n += implicit_value(e, {static_cast<double>(x), static_cast<double>(y)}) <= 1.0;
  return n;
}

// Signed radial distance to the contour (negative inside).
double radial_distance(const EllipseModel& e, Vec2 p) {
  const double q = implicit_value(e, p);
  const double r = norm(p - e.center);
  if (q <= 0.0) return -std::min(e.a, e.b);
  return r * (1.0 - 1.0 / std::sqrt(q));
}

bool contained(const EllipseModel& cell, const EllipseModel& zone) {
  for (int k = 0; k < 72; ++k)
    if (implicit_value(zone, ellipse_point(cell, 2.0 * std::numbers::pi * k / 72.0)) > 1.0) return false;
  return true;
}

// Centre distance, in units of the radius sum, at which two equal disks overlap
// by `fraction` of their area.
double separation_for_overlap(double fraction) {
  if (fraction <= 0.0) return 1.0;
  if (fraction >= 1.0) return 0.0;
  double lo = 0.0, hi = 2.0;  // distance in units of the radius
  for (int i = 0; i < 60; ++i) {
    const double x = 0.5 * (lo + hi);
    const double lens = 2.0 * std::acos(x / 2.0) - (x / 2.0) * std::sqrt(4.0 - x * x);
    if (lens / std::numbers::pi > fraction) lo = x;
    else hi = x;
  }
  return 0.5 * (lo + hi) / 2.0;
}

struct Layout {
  std::vector<EllipseModel> cells;
};

// Random sizes and positions relaxed by pairwise repulsion inside the zone.
Layout propose(Rng& rng, const SynthSpec& spec, const EllipseModel& zp, const EllipseModel& zone) {
  const int n = spec.n_cells;
  const double ab = zp.a * zp.b;
  const double alpha = 0.7 / n;
  const double beta = std::min(1.0 / n + 0.15, 1.0);
  const double eta = n < 6 ? 1.6 : 1.3;
  const double f_lo = alpha * 1.05;
  const double f_hi = std::min({beta * 0.97, std::max(1.0 / n, f_lo + 0.02), 0.85});
  const double r_hi = std::min(eta - 0.05, 1.3);

  const double spacing = separation_for_overlap(0.6 * spec.overlap_max);
  Layout out;
  for (int i = 0; i < n; ++i) {
    const double f = rng.uniform(f_lo, f_hi);
    const double r = rng.uniform(1.0, r_hi);
    EllipseModel e;
    e.a = std::sqrt(f * ab * r);
    e.b = std::sqrt(f * ab / r);
    e.phi = rng.uniform(0.0, std::numbers::pi);
    const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double rad = 0.5 * zone.b * std::sqrt(rng.uniform());
    e.center = zone.center + Vec2{std::cos(t), std::sin(t)} * rad;
    out.cells.push_back(e);
  }

  // Extent of an ellipse from its centre along unit direction u.
  auto reach = [](const EllipseModel& e, Vec2 u) {
    const double c = std::cos(e.phi), s = std::sin(e.phi);
    const double along = c * u.x + s * u.y, across = -s * u.x + c * u.y;
    return e.a * e.b / std::hypot(e.b * along, e.a * across);
  };
  for (int iter = 0; iter < 400; ++iter) {
    bool moved = false;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        EllipseModel& p = out.cells[static_cast<std::size_t>(i)];
        EllipseModel& q = out.cells[static_cast<std::size_t>(j)];
        const Vec2 d = q.center - p.center;
        const double dist = norm(d);
        const Vec2 u = dist > 1e-9 ? d * (1.0 / dist) : Vec2{1.0, 0.0};
        const double want = spacing * (reach(p, u) + reach(q, u));
        if (dist >= want) continue;
        const double push = 0.25 * (want - dist);
        p.center = p.center - u * push;
        q.center = q.center + u * push;
        moved = true;
      }
    for (EllipseModel& e : out.cells) {
      const Vec2 d = zone.center - e.center;
      const double dist = norm(d);
      // cells away from the middle lie with their long axis along the zona
      if (n > 1 && dist > 0.15 * zone.b) e.phi = wrap_half_turn(std::atan2(d.y, d.x) + std::numbers::pi / 2.0);
      if (!contained(e, zone)) {
        if (dist > 1e-9) e.center = e.center + d * (std::min(1.0, dist) / dist);
        moved = true;
      }
    }
    if (!moved) break;
  }
  return out;
}

}  // namespace

double overlap_fraction(const EllipseModel& a, const EllipseModel& b, int width, int height) {
  const long long na = filled_count(a, width, height);
  const long long nb = filled_count(b, width, height);
  if (na == 0 || nb == 0) return 0.0;
  const Box ba = bounds(a, width, height, 1.0), bb = bounds(b, width, height, 1.0);
  long long both = 0;
  for (int y = std::max(ba.y0, bb.y0); y <= std::min(ba.y1, bb.y1); ++y)
    for (int x = std::max(ba.x0, bb.x0); x <= std::min(ba.x1, bb.x1); ++x) {
      const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
      both += implicit_value(a, p) <= 1.0 && implicit_value(b, p) <= 1.0;
    }
  return static_cast<double>(both) / static_cast<double>(std::min(na, nb));
}

SynthEmbryo generate_embryo(const SynthSpec& spec) {
  if (spec.n_cells < 1 || spec.n_cells > 8) throw InvalidArgument("cell count must be in [1, 8]");
  if (!(spec.zp_radius > 10.0) || spec.overlap_max < 0.0 || spec.fragmentation < 0.0 || spec.noise_sigma < 0.0)
    throw InvalidArgument("invalid synthesis parameters");
  if (2.0 * spec.zp_radius * 1.05 + 30.0 > std::min(spec.width, spec.height))
    throw InvalidArgument("zona does not fit in the image");

  Rng rng(spec.seed);
  const ValueNoise noise(rng.bits());

  SynthEmbryo out;
  const double ecc = rng.uniform(0.0, 0.05);
  out.zp.center = {(spec.width - 1) / 2.0 + rng.uniform(-4.0, 4.0), (spec.height - 1) / 2.0 + rng.uniform(-4.0, 4.0)};
  out.zp.a = spec.zp_radius * (1.0 + ecc);
  out.zp.b = spec.zp_radius * (1.0 - ecc);
  out.zp.phi = rng.uniform(0.0, std::numbers::pi);
  const EllipseModel zone{out.zp.center, out.zp.a - 4.0, out.zp.b - 4.0, out.zp.phi};

  bool placed = false;
  for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
    Layout layout = propose(rng, spec, out.zp, zone);
    placed = std::all_of(layout.cells.begin(), layout.cells.end(),
                         [&](const EllipseModel& e) { return contained(e, zone); });
    for (std::size_t i = 0; placed && i < layout.cells.size(); ++i)
      for (std::size_t j = i + 1; placed && j < layout.cells.size(); ++j)
        if (overlap_fraction(layout.cells[i], layout.cells[j], spec.width, spec.height) > spec.overlap_max)
          placed = false;
    if (placed) out.cells = std::move(layout.cells);
  }
  if (!placed) throw PlacementFailure("could not place cells within the overlap limit after 1000 attempts");

  const int w = spec.width, h = spec.height;
  GrayImage img(w, h, 0.0);

  // background, zona rim and perivitelline space
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
      const double t = noise.fbm(x, y, 40.0);
      const double d = radial_distance(out.zp, p);
      double v;
      if (d >= 0.0) v = 0.12 + 0.02 * t + 0.63 * std::exp(-d / 6.0);
      else v = 0.2 + 0.02 * t + 0.55 * std::exp(-d * d / (2.0 * 1.2 * 1.2));
      img(x, y) = v;
    }

  const double light = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const Vec2 L{std::cos(light), std::sin(light)};
  auto paint = [&](const EllipseModel& e, double body_level, double rim_amp, double opacity, double tex_period) {
    const Box b = bounds(e, w, h, 6.0);
    const Conic q = ellipse_conic(e);
    for (int y = b.y0; y <= b.y1; ++y)
      for (int x = b.x0; x <= b.x1; ++x) {
        const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
        const double d = radial_distance(e, p);
        if (d < 0.0) {
          const double shade = 0.06 * dot(p - e.center, L) / e.a;
          const double body = body_level + shade + 0.03 * noise.fbm(x + 1000.0, y, tex_period);
          img(x, y) = (1.0 - opacity) * img(x, y) + opacity * body;
        }
        if (std::abs(d) < 6.0) {
          const Vec2 g = q.gradient(p);
          const double gl = norm(g);
          const double facing = gl > 0.0 ? dot(g * (1.0 / gl), L) : 0.0;
          const double amp = rim_amp * (0.6 + 0.4 * facing);
          img(x, y) += amp * std::exp(-d * d / (2.0 * 1.1 * 1.1));
        }
      }
  };
  for (const EllipseModel& e : out.cells) paint(e, 0.38, 0.32, 0.6, 12.0);

  const double zp_area = std::numbers::pi * out.zp.a * out.zp.b;
  out.fragments = static_cast<int>(std::lround(spec.fragmentation * zp_area / 600.0));
  const EllipseModel frag_zone{out.zp.center, out.zp.a - 10.0, out.zp.b - 10.0, out.zp.phi};
  for (int k = 0; k < out.fragments; ++k) {
    EllipseModel f;
    const double r = rng.uniform(3.0, 7.0);
    f.a = r * rng.uniform(1.0, 1.4);
    f.b = r;
    f.phi = rng.uniform(0.0, std::numbers::pi);
    const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double s = std::sqrt(rng.uniform());
    f.center = ellipse_point({frag_zone.center, frag_zone.a * s, frag_zone.b * s, frag_zone.phi}, t);
    paint(f, 0.45, 0.25, 0.7, 4.0);
  }

  for (double& v : img.values()) {
    v += spec.noise_sigma * rng.normal();
    v = std::clamp(v, 0.0, 1.0);
    v = std::round(v * 255.0) / 255.0;
  }
  out.image = std::move(img);

  out.truth.n_cells = spec.n_cells;
  out.truth.artifact = out.fragments > 0;
  out.truth.width = w;
  out.truth.height = h;
  for (const EllipseModel& e : out.cells) out.truth.blastomeres.push_back(sample_contour(e, 360));
  return out;
}

}  // namespace blastomere
