#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "blastomere/image.hpp"

namespace blastomere {

// Hessian eigen-decomposition at one scale. |lambda1| <= |lambda2|; theta is the
// direction of lambda2's eigenvector in [0, pi).
struct HessianEigenField {
  Grid<double> lambda1;
  Grid<double> lambda2;
  Grid<double> theta;
  double sigma = 0.0;
};

struct VesselnessResponse {
  Grid<double> v;            // in [0,1]
  Grid<double> orientation;  // ridge normal in [0, pi), from the maximizing scale
  Grid<double> sigma_star;   // maximizing scale
};

// Binary edge mask (0 / 1).
class EdgeMap : public Grid<std::uint8_t> {
 public:
  using Grid::Grid;
  explicit EdgeMap(Grid<std::uint8_t> g) : Grid(std::move(g)) {}

  bool edge(int x, int y) const { return contains(x, y) && (*this)(x, y) != 0; }
  bool edge(Pixel p) const { return edge(p.x, p.y); }
  std::size_t count() const;
  std::vector<Pixel> pixels() const;
};

// Second derivatives of the Gaussian-smoothed image scaled by sigma^2.
HessianEigenField hessian_eigen(const GrayImage& img, double sigma);

// Frangi ridge measure for bright ridges (lambda2 < 0).
VesselnessResponse vesselness_at_scale(const HessianEigenField& field, double alpha, double beta);

// Largest Frobenius norm sqrt(l1^2 + l2^2) in the field.
double max_structureness(const HessianEigenField& field);

// Geometric ladder sigma_min * r^i, i = 0..n-1, ending at sigma_max.
std::vector<double> scale_ladder(double sigma_min, double sigma_max, int n_scales);

struct VesselnessParams {
  double alpha = 0.5;
  double beta = 0.0;  // <= 0: half the largest structureness over all scales
};

// Per-pixel maximum over the scale ladder; ties go to the smaller scale.
VesselnessResponse multiscale_vesselness(const GrayImage& img, double sigma_min, double sigma_max,
                                         int n_scales, VesselnessParams params = {});

// Non-maxima suppression across the ridge followed by hysteresis thresholding.
EdgeMap edge_map(const VesselnessResponse& resp, double low, double high);

// Removes 4-connected staircase pixels so curves are one pixel thick under
// 8-connectivity: a pixel goes when it touches two perpendicular 4-neighbours
// and its removal keeps the local 8-connectivity. Curve tips are never removed.
EdgeMap thin_edges(const EdgeMap& edges);

// Drops every 8-connected component with fewer than min_segment_len pixels.
EdgeMap clean_small_segments(const EdgeMap& edges, int min_segment_len);

// 8-connected component labels (0 = background, components numbered from 1
// in scanline discovery order). Returns the number of components.
int label_components(const EdgeMap& edges, Grid<int>& labels);

}  // namespace blastomere
