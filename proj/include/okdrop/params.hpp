#pragma once

#include <cmath>
#include <numbers>

#include "okdrop/error.hpp"

namespace okdrop {

inline const double kCbrt3 = std::cbrt(3.0);
inline const double kThreeTwoThirds = kCbrt3 * kCbrt3;               // 3^{2/3}
inline const double kOptimalArea = kThreeTwoThirds * std::numbers::pi;  // 3^{2/3} pi
inline const double kOptimalPerimeter = 2.0 * kCbrt3 * std::numbers::pi;

/// Geometry and model constants of the flat torus [0, ell)^2.
struct TorusParams {
  double ell = 1.0;
  double kappa = 1.0;
  double delta_bar = 1.0;

  void validate() const {
    if (!(ell > 0.0) || !std::isfinite(ell)) throw ParameterError("torus side ell must be > 0");
    if (!(kappa > 0.0) || !std::isfinite(kappa))
      throw ParameterError("screening constant kappa must be > 0");
    if (!(delta_bar > 0.0) || !std::isfinite(delta_bar))
      throw ParameterError("background parameter delta_bar must be > 0");
  }

  double area() const { return ell * ell; }
  /// Constant term delta_bar^2 ell^2 / (2 kappa^2) of the rescaled energy.
  double background_energy() const {
    return delta_bar * delta_bar * ell * ell / (2.0 * kappa * kappa);
  }
};

/// The epsilon-dependent droplet scalings.
///
/// `length` converts a physical length to rescaled units (so P = length * |dOmega|),
/// `area` converts physical area (A = area * |Omega|), and `density` is the
/// height of the droplet measure on a droplet (mu = density * chi).
struct Scaling {
  double epsilon = 0.0;
  double abs_log = 0.0;
  double length = 0.0;
  double area = 0.0;
  double density = 0.0;
  double energy = 0.0;  // eps^{4/3} |ln eps|^{2/3}

  explicit Scaling(double eps) : epsilon(eps) {
    if (!(eps > 0.0) || !(eps < std::exp(-1.0)))
      throw ParameterError("epsilon must lie in (0, 1/e)");
    abs_log = -std::log(eps);
    length = std::cbrt(abs_log / eps);
    area = length * length;
    density = area / abs_log;
    const double e23 = std::cbrt(eps * eps);
    energy = e23 * e23 * std::cbrt(abs_log * abs_log);
  }

  /// Radius of the optimal droplet, 3^{1/3} eps^{1/3} |ln eps|^{-1/3}.
  double optimal_radius() const { return kCbrt3 / length; }
};

}  // namespace okdrop
