#pragma once

#include <array>
#include <vector>

#include "blastomere/image.hpp"

namespace blastomere {

// Ellipse with semi-axes a >= b > 0 and orientation phi of the major axis in [0, pi).
struct EllipseModel {
  Vec2 center;
  double a = 0.0;
  double b = 0.0;
  double phi = 0.0;

  friend bool operator==(const EllipseModel&, const EllipseModel&) = default;
};

// Returns the ellipse with a >= b and phi wrapped into [0, pi).
EllipseModel canonical(EllipseModel e);

bool is_valid(const EllipseModel& e);
double area(const EllipseModel& e);

// Coefficients of a x^2 + b xy + c y^2 + d x + e y + f = 0.
struct Conic {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0, f = 0.0;

  double operator()(Vec2 p) const { return a * p.x * p.x + b * p.x * p.y + c * p.y * p.y + d * p.x + e * p.y + f; }
  Vec2 gradient(Vec2 p) const { return {2.0 * a * p.x + b * p.y + d, b * p.x + 2.0 * c * p.y + e}; }
};

// Conic normalized so a + c = 1.
Conic ellipse_conic(const EllipseModel& e);

// Inverse of ellipse_conic; throws DegenerateGeometry when the conic is not a real ellipse.
EllipseModel conic_to_ellipse(const Conic& q);

// Point at parameter t of the parametric form.
Vec2 ellipse_point(const EllipseModel& e, double t);

// (x'/a)^2 + (y'/b)^2 in the ellipse frame: < 1 inside, 1 on the contour.
double implicit_value(const EllipseModel& e, Vec2 p);

double perimeter(const EllipseModel& e);

// n points at equal parameter spacing.
std::vector<Vec2> sample_contour(const EllipseModel& e, int n);

// Points at (approximately) equal arc-length spacing `step`.
std::vector<Vec2> sample_contour_arclength(const EllipseModel& e, double step = 1.0);

// Pixels hit by the contour, each listed once, in contour order.
std::vector<Pixel> contour_pixels(const EllipseModel& e);

// Distinct offsets (relative to the rounded center) of the contour pixels.
std::vector<Pixel> contour_offsets(double a, double b, double phi);

// Filled ellipse mask on pixel centers.
Grid<std::uint8_t> fill_ellipse(const EllipseModel& e, int width, int height);

// Even-odd polygon fill on pixel centers.
Grid<std::uint8_t> fill_polygon(const std::vector<Vec2>& polygon, int width, int height);

// Distance from p to the polyline segment [a, b].
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

// Angle difference between two undirected directions, in [0, pi/2].
double undirected_angle_diff(double a, double b);

// Wraps an angle into [0, pi).
double wrap_half_turn(double a);

// Samples along a straight line from a to b, one per pixel step, inclusive.
std::vector<Pixel> raster_line(Pixel a, Pixel b);

}  // namespace blastomere
