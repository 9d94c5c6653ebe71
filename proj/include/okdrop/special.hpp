#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace okdrop {

/// Epsilon-zeta constants Z(s) = sum' |j|^{-2s} over Z^2 (analytic continuation),
/// used by the corrected trapezoidal rule for 1/|x| singularities.
inline constexpr double kLatticeZetaHalf = -3.9002649200019558828;
inline constexpr double kLatticeZetaMinusHalf = -0.22882431037721895335;

/// Exponential integral E1(z) for z > 0.
double exp_integral_e1(double z);

/// Entire function Ein(z) = E1(z) + gamma + ln z.
double exp_integral_ein(double z);

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order (cached, thread-safe).
const GaussRule& gauss_legendre(int order);

/// Nodes/weights mapped onto [a, b].
struct MappedRule {
  std::vector<double> x;
  std::vector<double> w;
};
MappedRule gauss_on_interval(int order, double a, double b);

inline double bessel_i0(double z) { return std::cyl_bessel_i(0.0, z); }
inline double bessel_i1(double z) { return std::cyl_bessel_i(1.0, z); }
inline double bessel_i2(double z) { return std::cyl_bessel_i(2.0, z); }
inline double bessel_k0(double z) { return std::cyl_bessel_k(0.0, z); }
inline double bessel_k1(double z) { return std::cyl_bessel_k(1.0, z); }

}  // namespace okdrop
