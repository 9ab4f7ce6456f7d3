#pragma once

#include <cstdint>
#include <random>

#include "blastomere/evaluation.hpp"
#include "blastomere/geometry.hpp"
#include "blastomere/image.hpp"

namespace blastomere {

// Portable random stream: raw mt19937_64 bits turned into doubles by hand so the
// sequence does not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct SynthSpec {
  int n_cells = 1;
  double zp_radius = 100.0;
  double overlap_max = 0.2;
  double fragmentation = 0.1;
  double noise_sigma = 0.02;
  std::uint64_t seed = 0;
  int width = 260;
  int height = 260;
};

struct SynthEmbryo {
  GrayImage image;  // values on the 8-bit grid, in [0, 1]
  GroundTruth truth;
  EllipseModel zp;  // inner zona boundary
  std::vector<EllipseModel> cells;  // back to front
  int fragments = 0;
};

// Throws PlacementFailure when the cells cannot be placed after 1000 attempts,
// InvalidArgument for an invalid spec.
SynthEmbryo generate_embryo(const SynthSpec& spec);

// |A n B| / min(|A|, |B|) for two filled ellipses on the pixel grid.
double overlap_fraction(const EllipseModel& a, const EllipseModel& b, int width, int height);

}  // namespace blastomere
