#pragma once

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "blastomere/image.hpp"
#include "blastomere/vesselness.hpp"

namespace blastomere {

// Ordered 8-connected pixel trail of one traced curve. A closed chain does not
// repeat its first pixel.
struct PixelChain {
  std::vector<Pixel> points;
  bool closed = false;
};

// Interval of feasible directions [theta_min, theta_max] for lines through the
// segment anchor, expressed relative to a reference direction.
struct ConeInterval {
  double theta_min = -std::numbers::pi;
  double theta_max = std::numbers::pi;

  bool empty() const { return theta_min > theta_max; }
  bool contains(double t) const { return t >= theta_min && t <= theta_max; }
  ConeInterval intersect(ConeInterval o) const;
};

// One piecewise-linear curve fragment with its arc geometry. The centroid is
// absent when the bisectors of the polyline do not determine a point.
struct EdgeCluster {
  std::vector<Vec2> vertices;
  std::vector<Pixel> pixels;  // traced pixels in vertex order, including merge bridges
  std::optional<Vec2> centroid;
  double residual = 0.0;
  double radius = 0.0;
  double arch_length = 0.0;
  double arch_angle = 0.0;
  bool closed = false;
};

std::vector<PixelChain> trace_curves(const EdgeMap& edges);

// Greedy longest-feasible-segment fit. Returns indices of the vertices into the
// chain; for a closed chain the index chain.points.size() denotes the first
// point again.
std::vector<std::size_t> piecewise_linear_approx(const PixelChain& chain, double epsilon);

struct ArchCentroid {
  Vec2 point;
  double residual = 0.0;
};

// Least-squares meeting point of the perpendicular bisectors of the polyline
// segments. Throws DegenerateGeometry when the bisectors are (near) parallel.
ArchCentroid arch_centroid(std::span<const Vec2> vertices);

struct ArchProperties {
  double radius = 0.0;
  double arch_length = 0.0;
  double arch_angle = 0.0;
};

ArchProperties cluster_properties(std::span<const Vec2> vertices, Vec2 centroid);

// Twice the quadratic coefficient of the parabola through the three points.
double concavity_coefficient(Vec2 p1, Vec2 p2, Vec2 p3);

// Sign (-1, 0, +1) of the concavity after rotating the triple so that the
// chord p1->p3 is horizontal, i.e. the side of the chord p2 lies on; nullopt
// when p1 == p3.
std::optional<int> concavity_sign(Vec2 p1, Vec2 p2, Vec2 p3);

// Polyline approximation plus arc geometry for one chain (>= 2 points).
EdgeCluster make_cluster(const PixelChain& chain, double epsilon);

// Recomputes centroid / radius / arch length / arch angle from the vertices.
void update_properties(EdgeCluster& cluster);

std::vector<EdgeCluster> build_clusters(const EdgeMap& edges, double epsilon);

struct CoAssociationParams {
  double slope_gate = std::numbers::pi / 8.0;
  double centroid_gate = 0.25;
  double max_gap = 15.0;
  int tangent_span = 6;
};

// Merges clusters that continue each other (slope, centroid and concavity
// tests) until no admissible pair remains.
std::vector<EdgeCluster> co_associate(std::vector<EdgeCluster> clusters, const CoAssociationParams& params = {});

EdgeMap rasterize_clusters(std::span<const EdgeCluster> clusters, int width, int height);

// One record per cluster: vertices, centroid, radius, arch angle.
void write_cluster_dump(std::ostream& out, std::span<const EdgeCluster> clusters);

}  // namespace blastomere
