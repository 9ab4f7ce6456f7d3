#pragma once

#include <span>

#include "blastomere/geometry.hpp"

namespace blastomere {

// Direct least-squares ellipse fit (ellipse-specific constraint 4ac - b^2 = 1).
// Needs at least 5 points; throws DegenerateGeometry when no real ellipse results.
Conic fit_conic(std::span<const Vec2> points);
EllipseModel fit_ellipse(std::span<const Vec2> points);

// First-order geometric distance |Q(p)| / |grad Q(p)|.
double sampson_distance(const Conic& q, Vec2 p);

// Distance from p to the ellipse contour by dense sampling.
double contour_distance(const EllipseModel& e, Vec2 p, int samples = 720);

}  // namespace blastomere
