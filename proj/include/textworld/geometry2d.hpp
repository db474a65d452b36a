#pragma once

#include <span>
#include <vector>

#include "textworld/math.hpp"

namespace textworld {

using Polygon = std::vector<Vec2>;

// Signed shoelace area; positive for counter-clockwise in a y-up frame.
double signed_area(std::span<const Vec2> poly);
inline double area(std::span<const Vec2> poly) { return std::abs(signed_area(poly)); }

bool is_convex(std::span<const Vec2> poly);

// Sutherland-Hodgman clip of `subject` against the convex polygon `clip`.
Polygon clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip);

Polygon clip_to_rect(std::span<const Vec2> subject, double x0, double y0, double x1, double y1);

// Area of the intersection of two convex polygons.
double intersection_area(std::span<const Vec2> a, std::span<const Vec2> b);

// Point containment for convex polygons of either winding (boundary counts).
bool contains_convex(std::span<const Vec2> poly, Vec2 p);

}  // namespace textworld
