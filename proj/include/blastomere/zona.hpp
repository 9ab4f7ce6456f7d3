#pragma once

#include <optional>
#include <span>
#include <vector>

#include "blastomere/clustering.hpp"
#include "blastomere/geometry.hpp"

namespace blastomere {

// Inner zona boundary.
struct ZpModel {
  EllipseModel ellipse;
  double mean_radius = 0.0;
  bool fallback = false;  // true when derived from the image frame instead of edges
};

struct ZonaParams {
  int beams = 360;
  std::optional<Vec2> center;  // beam origin; image centre when unset
  double reject_factor = 2.0;
  double min_reject_residual = 0.5;
  int max_rounds = 5;
  double vertex_tol = 0.02;
  double centroid_tol = 0.10;
};

// Mean distance from the centre to the contour over 360 equally spaced parameters.
double mean_radius(const EllipseModel& e);

ZpModel make_zp(const EllipseModel& e);

// Outermost cluster hit on each radial beam; one point per beam that hits.
std::vector<Vec2> beam_samples(std::span<const EdgeCluster> clusters, Vec2 origin, int width, int height,
                               int beams);

// Robust ellipse fit to the beam samples. Throws NoZonaFound.
ZpModel estimate_inner_zp(std::span<const EdgeCluster> clusters, Vec2 img_center, int width, int height,
                          const ZonaParams& params = {});

// Largest ellipse inscribed in the frame, used when no zona is visible.
ZpModel fallback_zp(int width, int height);

bool is_zp_cluster(const EdgeCluster& cluster, const ZpModel& zp, const ZonaParams& params = {});

std::vector<EdgeCluster> remove_zp_clusters(std::span<const EdgeCluster> clusters, const ZpModel& zp,
                                            const ZonaParams& params = {});

// Clears edges farther than (min(width, height) / 2 - margin) from the image centre.
void apply_border_margin(EdgeMap& edges, double margin);

}  // namespace blastomere
