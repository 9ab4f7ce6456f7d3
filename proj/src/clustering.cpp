#include "blastomere/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

#include "blastomere/error.hpp"
#include "blastomere/geometry.hpp"

namespace blastomere {

namespace {

constexpr int kDx[8] = {1, 0, -1, 0, 1, -1, -1, 1};
constexpr int kDy[8] = {0, -1, 0, 1, -1, -1, 1, 1};

bool adjacent(Pixel a, Pixel b) { return a != b && std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1; }

double signed_wrap(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

double angle_between(Vec2 u, Vec2 v) { return std::abs(std::atan2(cross(u, v), dot(u, v))); }

}  // namespace

ConeInterval ConeInterval::intersect(ConeInterval o) const {
  return {std::max(theta_min, o.theta_min), std::min(theta_max, o.theta_max)};
}

std::vector<PixelChain> trace_curves(const EdgeMap& edges) {
  const int w = edges.width();
  const int h = edges.height();
  Grid<int> degree(w, h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!edges(x, y)) continue;
      int d = 0;
      for (int k = 0; k < 8; ++k) d += edges.edge(x + kDx[k], y + kDy[k]) ? 1 : 0;
      degree(x, y) = d;
    }
  auto is_junction = [&](Pixel p) { return degree[p] >= 3; };
  auto plain = [&](int x, int y) { return edges.edge(x, y) && degree(x, y) < 3; };

  std::vector<PixelChain> chains;
  Grid<std::uint8_t> used(w, h, 0);
  Grid<std::uint8_t> walked(w, h, 0);

  // non-junction pixels form simple paths or cycles
  std::vector<Pixel> component;
  std::vector<Pixel> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!plain(x, y) || used(x, y)) continue;
      component.clear();
      used(x, y) = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        component.push_back(p);
        for (int k = 0; k < 8; ++k) {
          const int nx = p.x + kDx[k];
          const int ny = p.y + kDy[k];
          if (plain(nx, ny) && !used(nx, ny)) {
            used(nx, ny) = 1;
            stack.push_back({nx, ny});
          }
        }
      }
      auto sub_degree = [&](Pixel p) {
        int d = 0;
        for (int k = 0; k < 8; ++k) d += plain(p.x + kDx[k], p.y + kDy[k]) ? 1 : 0;
        return d;
      };
      std::sort(component.begin(), component.end(),
                [](Pixel a, Pixel b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
      Pixel start = component.front();
      bool cycle = true;
      for (Pixel p : component)
        if (sub_degree(p) <= 1) {
          start = p;
          cycle = false;
          break;
        }

      auto walk_from = [&](Pixel first) {
        PixelChain chain;
        chain.points.push_back(first);
        walked[first] = 1;
        for (Pixel cur = first;;) {
          bool moved = false;
          for (int k = 0; k < 8; ++k) {
            const Pixel n{cur.x + kDx[k], cur.y + kDy[k]};
            if (!plain(n.x, n.y) || walked[n]) continue;
            walked[n] = 1;
            chain.points.push_back(n);
            cur = n;
            moved = true;
            break;
          }
          if (!moved) break;
        }
        return chain;
      };
      PixelChain chain = walk_from(start);
      chain.closed = cycle && chain.points.size() == component.size() && chain.points.size() >= 3 &&
                     adjacent(chain.points.back(), start);
      chains.push_back(std::move(chain));
      for (Pixel p : component)
        if (!walked[p]) chains.push_back(walk_from(p));
    }
  }

  // attach junction pixels to adjacent chain ends, one per end per round
  for (bool changed = true; changed;) {
    changed = false;
    for (PixelChain& c : chains) {
      if (c.closed) continue;
      for (int end = 0; end < 2; ++end) {
        const Pixel tip = end == 0 ? c.points.back() : c.points.front();
        for (int k = 0; k < 8; ++k) {
          const Pixel n{tip.x + kDx[k], tip.y + kDy[k]};
          if (!edges.edge(n) || !is_junction(n) || used[n]) continue;
          used[n] = 1;
          if (end == 0) c.points.push_back(n);
          else c.points.insert(c.points.begin(), n);
          changed = true;
          break;
        }
      }
    }
  }

  // junction pixels no chain reached form their own chains
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!edges(x, y) || used(x, y)) continue;
      PixelChain c;
      Pixel cur{x, y};
      used[cur] = 1;
      c.points.push_back(cur);
      for (bool moved = true; moved;) {
        moved = false;
        for (int k = 0; k < 8; ++k) {
          const Pixel n{cur.x + kDx[k], cur.y + kDy[k]};
          if (!edges.edge(n) || used[n]) continue;
          used[n] = 1;
          c.points.push_back(n);
          cur = n;
          moved = true;
          break;
        }
      }
      chains.push_back(std::move(c));
    }
  }
  return chains;
}

std::vector<std::size_t> piecewise_linear_approx(const PixelChain& chain, double epsilon) {
  if (chain.points.size() < 2) throw InvalidArgument("piecewise approximation needs at least 2 points");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");

  std::vector<Vec2> pts;
  pts.reserve(chain.points.size() + 1);
  for (Pixel p : chain.points) pts.push_back(to_vec(p));
  if (chain.closed) pts.push_back(pts.front());
  const std::size_t n = pts.size();

  auto segment_ok = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from + 1; k < to; ++k)
      if (point_segment_distance(pts[k], pts[from], pts[to]) > epsilon + 1e-9) return false;
    return true;
  };

  std::vector<std::size_t> vertices{0};
  std::size_t anchor = 0;
  std::vector<std::size_t> feasible;
  while (anchor + 1 < n) {
    ConeInterval cone;
    bool have_ref = false;
    double ref = 0.0;
    feasible.clear();
    for (std::size_t i = anchor + 1; i < n; ++i) {
      const Vec2 d = pts[i] - pts[anchor];
      const double dist = norm(d);
      const double psi = std::atan2(d.y, d.x);
      if (!have_ref && dist > epsilon) {
        have_ref = true;
        ref = psi;
      }
      const double rel = have_ref ? signed_wrap(psi - ref) : 0.0;
      if (dist > epsilon) {
        const double half = std::asin(epsilon / dist);
        cone = cone.intersect({rel - half, rel + half});
      }
      if (cone.empty()) break;
      if (dist <= epsilon || cone.contains(rel)) feasible.push_back(i);
    }
    std::size_t next = anchor + 1;
    for (auto it = feasible.rbegin(); it != feasible.rend(); ++it)
      if (segment_ok(anchor, *it)) {
        next = *it;
        break;
      }
    vertices.push_back(next);
    anchor = next;
  }
  return vertices;
}

ArchCentroid arch_centroid(std::span<const Vec2> vertices) {
  if (vertices.size() < 3) throw DegenerateGeometry("arch centroid needs at least two segments");
  const Vec2 origin = vertices.front();
  double m00 = 0, m01 = 0, m11 = 0, r0 = 0, r1 = 0;
  std::vector<std::tuple<double, double, double>> lines;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    const Vec2 p1 = vertices[i] - origin;
    const Vec2 p2 = vertices[i + 1] - origin;
    const Vec2 dir = p1 - p2;
    const double len = norm(dir);
    if (len == 0.0) continue;
    // (x1-x2) x + (y1-y2) y = (|p1|^2 - |p2|^2) / 2, normalized
    const double nx = dir.x / len;
    const double ny = dir.y / len;
    const double c = 0.5 * (dot(p1, p1) - dot(p2, p2)) / len;
    lines.emplace_back(nx, ny, c);
    m00 += nx * nx;
    m01 += nx * ny;
    m11 += ny * ny;
    r0 += nx * c;
    r1 += ny * c;
  }
  if (lines.size() < 2) throw DegenerateGeometry("arch centroid needs at least two segments");
  const double det = m00 * m11 - m01 * m01;
  const double tr = m00 + m11;
  if (!(det > 1e-9 * tr * tr)) throw DegenerateGeometry("perpendicular bisectors are parallel");

  const double px = (m11 * r0 - m01 * r1) / det;
  const double py = (m00 * r1 - m01 * r0) / det;
  double f = 0.0;
  for (const auto& [nx, ny, c] : lines) {
    const double d = nx * px + ny * py - c;
    f += d * d;
  }
  return {Vec2{px, py} + origin, f};
}

ArchProperties cluster_properties(std::span<const Vec2> vertices, Vec2 centroid) {
  if (vertices.size() < 2) throw InvalidArgument("cluster needs at least two vertices");
  const Vec2 p1 = vertices.front();
  const Vec2 p2 = vertices.back();
  ArchProperties out;
  out.radius = 0.5 * (norm(p1 - centroid) + norm(p2 - centroid));
  if (!(out.radius > 0.0)) throw DegenerateGeometry("cluster radius is zero");
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) out.arch_length += norm(vertices[i + 1] - vertices[i]);

  const Vec2 u = centroid - p1;
  const Vec2 v = centroid - p2;
  const double mu = std::abs(std::atan2(cross(u, v), dot(u, v)));
  const double span = out.arch_length / out.radius;
  const double reflex = 2.0 * std::numbers::pi - mu;
  out.arch_angle = std::abs(reflex - span) < std::abs(mu - span) ? reflex : mu;
  return out;
}

double concavity_coefficient(Vec2 p1, Vec2 p2, Vec2 p3) {
  return 2.0 * p1.y / ((p1.x - p2.x) * (p1.x - p3.x)) + 2.0 * p2.y / ((p2.x - p1.x) * (p2.x - p3.x)) +
         2.0 * p3.y / ((p3.x - p1.x) * (p3.x - p2.x));
}

std::optional<int> concavity_sign(Vec2 p1, Vec2 p2, Vec2 p3) {
  // With the chord p1->p3 rotated onto the x axis the quadratic coefficient is
  // -2 y2' / ((x2' - x1')(x3' - x2')); its sign is the side of the chord p2 is
  // on, which stays meaningful when x2' falls outside the chord.
  const Vec2 chord = p3 - p1;
  const double len2 = dot(chord, chord);
  if (len2 == 0.0) return std::nullopt;
  const double side = cross(p2 - p1, chord);
  if (std::abs(side) <= 1e-9 * len2) return 0;
  return side > 0.0 ? 1 : -1;
}

void update_properties(EdgeCluster& cluster) {
  cluster.centroid.reset();
  cluster.residual = 0.0;
  cluster.radius = 0.0;
  cluster.arch_angle = 0.0;
  cluster.arch_length = 0.0;
  for (std::size_t i = 0; i + 1 < cluster.vertices.size(); ++i)
    cluster.arch_length += norm(cluster.vertices[i + 1] - cluster.vertices[i]);
  try {
    const ArchCentroid ac = arch_centroid(cluster.vertices);
    const ArchProperties props = cluster_properties(cluster.vertices, ac.point);
    cluster.centroid = ac.point;
    cluster.residual = ac.residual;
    cluster.radius = props.radius;
    cluster.arch_angle = props.arch_angle;
  } catch (const DegenerateGeometry&) {
    // straight or too short: no centroid
  }
}

EdgeCluster make_cluster(const PixelChain& chain, double epsilon) {
  const std::vector<std::size_t> idx = piecewise_linear_approx(chain, epsilon);
  EdgeCluster c;
  c.closed = chain.closed;
  c.pixels = chain.points;
  for (std::size_t i : idx) c.vertices.push_back(to_vec(chain.points[i % chain.points.size()]));
  update_properties(c);
  return c;
}

std::vector<EdgeCluster> build_clusters(const EdgeMap& edges, double epsilon) {
  std::vector<EdgeCluster> out;
  for (const PixelChain& chain : trace_curves(edges))
    if (chain.points.size() >= 2) out.push_back(make_cluster(chain, epsilon));
  return out;
}

namespace {

Vec2 end_tangent(const std::vector<Pixel>& px, int span) {
  const std::size_t n = px.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(span), n - 1);
  return to_vec(px[n - 1]) - to_vec(px[n - 1 - k]);
}

Vec2 start_tangent(const std::vector<Pixel>& px, int span) {
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(span), px.size() - 1);
  return to_vec(px[k]) - to_vec(px[0]);
}

EdgeCluster reversed(const EdgeCluster& c) {
  EdgeCluster r = c;
  std::reverse(r.vertices.begin(), r.vertices.end());
  std::reverse(r.pixels.begin(), r.pixels.end());
  return r;
}

// Joins first's tail to second's head.
EdgeCluster join(const EdgeCluster& first, const EdgeCluster& second) {
  EdgeCluster m;
  m.vertices = first.vertices;
  m.pixels = first.pixels;
  const std::vector<Pixel> bridge = raster_line(first.pixels.back(), second.pixels.front());
  for (std::size_t i = 1; i + 1 < bridge.size(); ++i) m.pixels.push_back(bridge[i]);
  std::size_t skip = (second.vertices.front() == first.vertices.back()) ? 1 : 0;
  m.vertices.insert(m.vertices.end(), second.vertices.begin() + static_cast<std::ptrdiff_t>(skip), second.vertices.end());
  std::size_t pskip = (second.pixels.front() == first.pixels.back()) ? 1 : 0;
  m.pixels.insert(m.pixels.end(), second.pixels.begin() + static_cast<std::ptrdiff_t>(pskip), second.pixels.end());
  update_properties(m);
  return m;
}

bool concavity_consistent(const EdgeCluster& first, const EdgeCluster& second, const EdgeCluster& merged) {
  std::vector<int> signs;
  auto record = [&](Vec2 a, Vec2 b, Vec2 c) {
    if (auto s = concavity_sign(a, b, c); s && *s != 0) signs.push_back(*s);
  };
  const auto& fv = first.vertices;
  const auto& sv = second.vertices;
  if (fv.size() >= 3) record(fv[fv.size() - 3], fv[fv.size() - 2], fv[fv.size() - 1]);
  if (sv.size() >= 3) record(sv[0], sv[1], sv[2]);
  const auto& mv = merged.vertices;
  const std::size_t join_at = fv.size();  // first vertex index contributed by `second` (or the shared one)
  const std::size_t lo = join_at >= 2 ? join_at - 2 : 0;
  for (std::size_t s = lo; s + 2 < mv.size() && s < join_at; ++s) record(mv[s], mv[s + 1], mv[s + 2]);
  return std::all_of(signs.begin(), signs.end(), [&](int s) { return s == signs.front(); });
}

bool slope_consistent(const EdgeCluster& first, const EdgeCluster& second, const CoAssociationParams& p) {
  const Vec2 t1 = end_tangent(first.pixels, p.tangent_span);
  const Vec2 t2 = start_tangent(second.pixels, p.tangent_span);
  if (angle_between(t1, t2) >= p.slope_gate) return false;
  const Vec2 bridge = to_vec(second.pixels.front()) - to_vec(first.pixels.back());
  if (norm(bridge) > 2.0) {
    if (angle_between(t1, bridge) >= p.slope_gate) return false;
    if (angle_between(bridge, t2) >= p.slope_gate) return false;
  }
  return true;
}

bool centroid_consistent(const EdgeCluster& a, const EdgeCluster& b, const EdgeCluster& merged,
                         const CoAssociationParams& p) {
  for (const EdgeCluster* orig : {&a, &b}) {
    if (!orig->centroid) continue;
    if (!merged.centroid) return false;
    if (norm(*merged.centroid - *orig->centroid) >= p.centroid_gate * orig->radius) return false;
  }
  return true;
}

}  // namespace

std::vector<EdgeCluster> co_associate(std::vector<EdgeCluster> clusters, const CoAssociationParams& params) {
  struct Candidate {
    double gap;
    std::size_t i, j;
    int combo;  // bit0: use i's head, bit1: use j's tail
  };
  for (;;) {
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      if (clusters[i].closed || clusters[i].pixels.size() < 2) continue;
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        if (clusters[j].closed || clusters[j].pixels.size() < 2) continue;
        for (int combo = 0; combo < 4; ++combo) {
          const Pixel ei = (combo & 1) ? clusters[i].pixels.front() : clusters[i].pixels.back();
          const Pixel ej = (combo & 2) ? clusters[j].pixels.back() : clusters[j].pixels.front();
          const double gap = norm(to_vec(ei) - to_vec(ej));
          if (gap <= params.max_gap) cands.push_back({gap, i, j, combo});
        }
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.gap, a.i, a.j, a.combo) < std::tie(b.gap, b.i, b.j, b.combo);
    });

    bool merged_any = false;
    for (const Candidate& c : cands) {
      const EdgeCluster first = (c.combo & 1) ? reversed(clusters[c.i]) : clusters[c.i];
      const EdgeCluster second = (c.combo & 2) ? reversed(clusters[c.j]) : clusters[c.j];
      if (!slope_consistent(first, second, params)) continue;
      const EdgeCluster merged = join(first, second);
      if (!centroid_consistent(first, second, merged, params)) continue;
      if (!concavity_consistent(first, second, merged)) continue;
      clusters[c.i] = merged;
      clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(c.j));
      merged_any = true;
      break;
    }
    if (!merged_any) break;
  }
  return clusters;
}

EdgeMap rasterize_clusters(std::span<const EdgeCluster> clusters, int width, int height) {
  EdgeMap out(width, height, 0);
  for (const EdgeCluster& c : clusters)
    for (Pixel p : c.pixels)
      if (out.contains(p)) out[p] = 1;
  return out;
}

void write_cluster_dump(std::ostream& out, std::span<const EdgeCluster> clusters) {
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const EdgeCluster& c = clusters[i];
    out << "cluster " << i << '\n' << "  vertices";
    for (Vec2 v : c.vertices) out << ' ' << v.x << ',' << v.y;
    out << '\n';
    if (c.centroid) out << "  centroid " << c.centroid->x << ',' << c.centroid->y << '\n';
    else out << "  centroid none\n";
    out << "  radius " << c.radius << "\n  arch_length " << c.arch_length << "\n  arch_angle " << c.arch_angle
        << '\n';
  }
}

}  // namespace blastomere
