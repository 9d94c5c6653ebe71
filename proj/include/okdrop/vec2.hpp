#pragma once

#include <cmath>

namespace okdrop {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double norm2() const { return x * x + y * y; }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// Wraps a coordinate into [-ell/2, ell/2).
inline double wrap_symmetric(double v, double ell) {
  double r = v - ell * std::floor(v / ell + 0.5);
  if (r >= 0.5 * ell) r -= ell;
  return r;
}

// Wraps a coordinate into [0, ell).
inline double wrap_positive(double v, double ell) {
  double r = v - ell * std::floor(v / ell);
  if (r >= ell) r -= ell;
  return r;
}

// Minimum-image representative of a torus displacement.
inline Vec2 min_image(const Vec2& d, double ell) {
  return {wrap_symmetric(d.x, ell), wrap_symmetric(d.y, ell)};
}

inline Vec2 wrap_point(const Vec2& p, double ell) {
  return {wrap_positive(p.x, ell), wrap_positive(p.y, ell)};
}

inline double torus_distance(const Vec2& a, const Vec2& b, double ell) {
  return min_image(a - b, ell).norm();
}

}  // namespace okdrop
