// 2D convex polygon queries used by the world model and collision handling.
#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

namespace parce {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;  // convex, CCW winding

double polygon_area(const Polygon& poly);

// Closed-set test: boundary points count as inside.
bool point_in_convex(const Polygon& poly, const Vec2& p);

// Separating-axis intersection for convex polygons; edge contact counts as
// intersecting (closed-set convention).
bool convex_intersect(const Polygon& a, const Polygon& b);

// Minimum translation vector that moves `a` out of `b`. Empty when disjoint.
// Zero-overlap contact returns a zero vector (still intersecting).
std::optional<Vec2> convex_mtv(const Polygon& a, const Polygon& b);

// Axis-aligned rectangle centered at (cx,cy), rotated by theta.
Polygon oriented_rect(double cx, double cy, double theta, double length, double width);

}  // namespace parce
