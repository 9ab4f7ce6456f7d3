#pragma once

#include <optional>

#include "blastomere/geometry.hpp"
#include "blastomere/image.hpp"

namespace blastomere {

// Direction of the conic gradient at p, modulo pi. Throws DegenerateGeometry
// when the gradient vanishes.
double model_normal_at(const Conic& conic, Vec2 p);

// Dominant gradient direction (mod pi) over the 5x5 window centred at p,
// averaged in doubled-angle form with magnitude weights. nullopt when the
// window carries less than `floor` total magnitude or the directions cancel.
// Throws InvalidArgument when the window leaves the image.
std::optional<double> image_normal_at(const GradientField& grad, Pixel p, double floor = 1e-6);

// image_normal_at for every pixel; NaN where undefined or too close to the border.
class NormalField {
 public:
  NormalField() = default;
  explicit NormalField(const GradientField& grad, double floor = 1e-6);

  std::optional<double> at(Pixel p) const;
  int width() const { return dir_.width(); }
  int height() const { return dir_.height(); }

 private:
  Grid<double> dir_;
};

// Gradient field used for normals: derivative of the image smoothed with sigma = 1.
GradientField normal_gradient(const GrayImage& img);

}  // namespace blastomere
