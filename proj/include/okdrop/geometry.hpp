#pragma once

#include <array>
#include <vector>

#include "okdrop/vec2.hpp"

namespace okdrop {

using Polygon = std::vector<Vec2>;
using Triangle = std::array<Vec2, 3>;

/// Shoelace area; positive for counter-clockwise vertex order.
double polygon_signed_area(const Polygon& poly);
double polygon_perimeter(const Polygon& poly);
Vec2 polygon_centroid(const Polygon& poly);
double polygon_diameter(const Polygon& poly);
/// True if no two non-adjacent edges meet and adjacent edges share only their vertex.
bool polygon_is_simple(const Polygon& poly);
bool point_in_polygon(const Polygon& poly, const Vec2& p);
double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);
double distance_to_boundary(const Polygon& poly, const Vec2& p);
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

/// Exact area of disk(center, r) intersected with a counter-clockwise simple polygon.
double disk_polygon_overlap(const Vec2& center, double r, const Polygon& poly);

/// Exact area of disk(center, r) intersected with [x0, x1] x [y0, y1].
double disk_rect_overlap(const Vec2& center, double r, double x0, double x1, double y0, double y1);

/// Area of a simple polygon clipped to the axis-aligned rectangle.
double polygon_rect_overlap(const Polygon& poly, double x0, double x1, double y0, double y1);

/// Ear-clipping triangulation of a counter-clockwise simple polygon.
std::vector<Triangle> triangulate(const Polygon& poly);

}  // namespace okdrop
