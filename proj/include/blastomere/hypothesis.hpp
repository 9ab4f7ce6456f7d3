#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "blastomere/correlation.hpp"
#include "blastomere/geometry.hpp"
#include "blastomere/normals.hpp"
#include "blastomere/vesselness.hpp"
#include "blastomere/zona.hpp"

namespace blastomere {

struct SizeRegion {
  double area_lo = 0.0;  // bounds on a * b
  double area_hi = 0.0;
  double eta = 1.0;
  int n = 1;

  bool admits(double a, double b) const { return a * b > area_lo && a * b < area_hi && b <= a && a < eta * b; }
};

SizeRegion admissible_region(const ZpModel& zp, int n);

// `steps` uniformly spaced samples per axis over the bounding box of the
// feasible region; feasible pairs only, a ascending then b ascending.
// Throws InvalidArgument when nothing is feasible.
std::vector<std::pair<double, double>> enumerate_axes(const SizeRegion& region, int steps);

// Same grid but with a fixed spacing in pixels.
std::vector<std::pair<double, double>> enumerate_axes_spacing(const SizeRegion& region, double spacing);

struct Hypothesis {
  EllipseModel ellipse;
  double correlation_score = 0.0;
  double compliance_score = 0.0;
  long long hits = 0;          // edge pixels under the dilated template
  long long template_size = 1; // undilated contour pixel count
  int rotation_index = 0;
};

// Exact comparison of correlation scores (hits / template_size).
int compare_correlation(const Hypothesis& x, const Hypothesis& y);

constexpr int kRotations = 18;

// Undilated contour offsets and the 1-px dilated stroke for one template.
struct Template {
  std::vector<Pixel> contour;
  std::vector<Pixel> stroke;
  std::vector<Vec2> ring;  // 72 contour samples relative to the centre, for containment
};
Template make_template(double a, double b, double phi);

// The 18 rotated templates of each size, built on first use.
class TemplateBank {
 public:
  const std::vector<Template>& get(double a, double b);

 private:
  std::map<std::pair<double, double>, std::vector<Template>> cache_;
};

// Searches placements of templates of different sizes against one edge map
// within the zona. Reuses the edge-map spectrum across sizes.
class PlacementSearch {
 public:
  PlacementSearch(const EdgeMap& edges, const ZpModel& zp, TemplateBank* bank = nullptr);

  // Best placement over 18 rotations; nullopt when no placement fits inside the zona.
  std::optional<Hypothesis> best(double a, double b);

 private:
  const ZpModel zp_;
  int x0_, y0_, w_, h_;  // region of interest in image coordinates
  std::optional<FftCorrelator> corr_;
  TemplateBank own_bank_;
  TemplateBank* bank_;
};

// Throws NoPlacement when the template cannot fit inside the zona.
Hypothesis best_placement(const EllipseModel& tpl, const EdgeMap& edges, const ZpModel& zp);

// True when all 72 contour samples lie inside the zona ellipse.
bool inside_zona(const EllipseModel& e, const ZpModel& zp);

// Deletes edge pixels within `tol` of the contour whose image normal agrees
// with the ellipse normal within pi/16.
EdgeMap remove_matched_edges(const EdgeMap& edges, const EllipseModel& e, const NormalField& normals,
                             double tol = 3.0);

}  // namespace blastomere
