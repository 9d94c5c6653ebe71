#include "okdrop/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "okdrop/error.hpp"

namespace okdrop {

double polygon_signed_area(const Polygon& poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * s;
}

double polygon_perimeter(const Polygon& poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) s += (poly[(i + 1) % n] - poly[i]).norm();
  return s;
}

Vec2 polygon_centroid(const Polygon& poly) {
  const std::size_t n = poly.size();
  double a = 0.0;
  Vec2 c;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double w = cross(p, q);
    a += w;
    c += (p + q) * w;
  }
  if (a == 0.0) throw GeometryError("centroid of a degenerate polygon");
  return c / (3.0 * a);
}

double polygon_diameter(const Polygon& poly) {
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, (poly[i] - poly[j]).norm());
  return d;
}

namespace {

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({(b - a).norm2(), (c - a).norm2(), 1e-300});
  if (std::abs(v) <= 1e-14 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool polygon_is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i)
    if ((poly[i] - poly[(i + 1) % n]).norm2() == 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Vec2& c = poly[j];
      const Vec2& d = poly[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges may only share their common vertex.
        const Vec2& shared = (j == i + 1) ? b : a;
        const Vec2& other_e = (j == i + 1) ? a : b;
        const Vec2& other_f = (j == i + 1) ? d : c;
        if (orientation(shared, other_e, other_f) == 0 &&
            dot(other_e - shared, other_f - shared) > 0.0)
          return false;
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

bool point_in_polygon(const Polygon& poly, const Vec2& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.norm2();
  double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + d * t - p).norm();
}

double distance_to_boundary(const Polygon& poly, const Vec2& p) {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) d = std::min(d, distance_to_segment(p, poly[i], poly[(i + 1) % n]));
  return d;
}

namespace {

// Signed area of disk(0, r) intersected with the triangle (0, a, b).
double disk_triangle_area(const Vec2& a, const Vec2& b, double r) {
  const Vec2 d = b - a;
  const double qa = d.norm2();
  if (qa == 0.0) return 0.0;
  const double r2 = r * r;
  auto sector = [r2](const Vec2& p, const Vec2& q) {
    return 0.5 * r2 * std::atan2(cross(p, q), dot(p, q));
  };
  auto tri = [](const Vec2& p, const Vec2& q) { return 0.5 * cross(p, q); };
  const bool a_in = a.norm2() <= r2;
  const bool b_in = b.norm2() <= r2;
  if (a_in && b_in) return tri(a, b);
  const double qb = dot(a, d);
  const double qc = a.norm2() - r2;
  const double disc = qb * qb - qa * qc;
  if (disc <= 0.0) return sector(a, b);
  const double s = std::sqrt(disc);
  const double t1 = (-qb - s) / qa;
  const double t2 = (-qb + s) / qa;
  const Vec2 p1 = a + d * t1;
  const Vec2 p2 = a + d * t2;
  if (a_in) return tri(a, p2) + sector(p2, b);
  if (b_in) return sector(a, p1) + tri(p1, b);
  if (t1 >= 0.0 && t2 <= 1.0) return sector(a, p1) + tri(p1, p2) + sector(p2, b);
  return sector(a, b);
}

}  // namespace

double disk_polygon_overlap(const Vec2& center, double r, const Polygon& poly) {
  double s = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    s += disk_triangle_area(poly[i] - center, poly[(i + 1) % n] - center, r);
  return std::max(0.0, s);
}

double disk_rect_overlap(const Vec2& c, double r, double x0, double x1, double y0, double y1) {
  const double dx = std::max({x0 - c.x, 0.0, c.x - x1});
  const double dy = std::max({y0 - c.y, 0.0, c.y - y1});
  if (dx * dx + dy * dy >= r * r) return 0.0;
  const double fx = std::max(std::abs(x0 - c.x), std::abs(x1 - c.x));
  const double fy = std::max(std::abs(y0 - c.y), std::abs(y1 - c.y));
  if (fx * fx + fy * fy <= r * r) return (x1 - x0) * (y1 - y0);
  const Polygon rect{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  return disk_polygon_overlap(c, r, rect);
}

double polygon_rect_overlap(const Polygon& poly, double x0, double x1, double y0, double y1) {
  // Sutherland-Hodgman against the four half-planes of a convex clip region.
  Polygon cur = poly;
  auto clip = [&cur](auto inside, auto intersect) {
    Polygon out;
    const std::size_t n = cur.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = cur[i];
      const Vec2& q = cur[(i + 1) % n];
      const bool pin = inside(p);
      const bool qin = inside(q);
      if (pin) out.push_back(p);
      if (pin != qin) out.push_back(intersect(p, q));
    }
    cur = std::move(out);
  };
  auto at_x = [](double x) {
    return [x](const Vec2& p, const Vec2& q) {
      const double t = (x - p.x) / (q.x - p.x);
      return Vec2{x, p.y + t * (q.y - p.y)};
    };
  };
  auto at_y = [](double y) {
    return [y](const Vec2& p, const Vec2& q) {
      const double t = (y - p.y) / (q.y - p.y);
      return Vec2{p.x + t * (q.x - p.x), y};
    };
  };
  clip([x0](const Vec2& p) { return p.x >= x0; }, at_x(x0));
  if (cur.empty()) return 0.0;
  clip([x1](const Vec2& p) { return p.x <= x1; }, at_x(x1));
  if (cur.empty()) return 0.0;
  clip([y0](const Vec2& p) { return p.y >= y0; }, at_y(y0));
  if (cur.empty()) return 0.0;
  clip([y1](const Vec2& p) { return p.y <= y1; }, at_y(y1));
  if (cur.size() < 3) return 0.0;
  return std::abs(polygon_signed_area(cur));
}

std::vector<Triangle> triangulate(const Polygon& poly) {
  std::vector<Triangle> tris;
  std::vector<std::size_t> idx(poly.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::size_t guard = 0;
  while (idx.size() > 3) {
    bool clipped = false;
    const std::size_t m = idx.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Vec2& a = poly[idx[(k + m - 1) % m]];
      const Vec2& b = poly[idx[k]];
      const Vec2& c = poly[idx[(k + 1) % m]];
      if (cross(b - a, c - b) <= 0.0) continue;
      bool ear = true;
      for (std::size_t q = 0; q < m && ear; ++q) {
        if (q == k || q == (k + 1) % m || q == (k + m - 1) % m) continue;
        const Vec2& p = poly[idx[q]];
        if (cross(b - a, p - a) >= 0.0 && cross(c - b, p - b) >= 0.0 && cross(a - c, p - c) >= 0.0)
          ear = false;
      }
      if (!ear) continue;
      tris.push_back({a, b, c});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
      clipped = true;
      break;
    }
    if (!clipped || ++guard > 100000) throw GeometryError("triangulation failed: polygon not simple");
  }
  tris.push_back({poly[idx[0]], poly[idx[1]], poly[idx[2]]});
  return tris;
}

}  // namespace okdrop
