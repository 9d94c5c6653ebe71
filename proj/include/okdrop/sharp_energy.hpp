#pragma once

#include <functional>
#include <string>
#include <vector>

#include "okdrop/droplet.hpp"
#include "okdrop/green.hpp"

namespace okdrop {

struct EnergyBreakdown {
  double background = 0.0;
  double perimeter_term = 0.0;
  double area_term = 0.0;
  double self_interaction = 0.0;
  double pair_interaction = 0.0;
  double total_rescaled = 0.0;
  double total_physical = 0.0;

  std::string to_json() const;
};

/// Background phase value -1 + eps^{2/3} |ln eps|^{1/3} delta_bar.
double background_density(double epsilon, const TorusParams& params);

/// Quadrature nodes (absolute, unwrapped) and weights covering one droplet.
struct QuadRule {
  std::vector<Vec2> x;
  std::vector<double> w;
};
QuadRule droplet_quadrature(const Droplet& d, int order);

/// Newton charge of a disk: int_{D_a} G(x - y) dy = q(a) G(x - c) for x outside the disk.
double disk_charge(double kappa, double a);
/// d q / d a.
double disk_charge_derivative(double kappa, double a);
/// Free-space screened self integral int int_{D_a x D_a} K0(kappa|x-y|) / (2 pi).
double disk_free_self(double kappa, double a);
double disk_free_self_derivative(double kappa, double a);
/// Constant G(x) - K0(kappa|x|)/(2pi) at x = 0 (sum over the nonzero images).
double image_constant(const GreenEvaluator& g);
/// int int_{D_a x D_a} ln|x - y| dx dy = pi^2 a^4 (ln a - 1/4).
double disk_log_self_integral(double a);
/// int_P ln|x - y| dy for a counter-clockwise polygon, exact.
double polygon_log_potential(const Polygon& poly, const Vec2& x);

/// Physical double integral int int_{Omega_i x Omega_j} G.
double pair_integral(const Droplet& a, const Droplet& b, const GreenEvaluator& g, int quad_order);
double self_integral(const Droplet& d, const GreenEvaluator& g, int quad_order);

/// Symmetric matrix (row-major, N x N) of 2 int int G dmu_i dmu_j.
std::vector<double> interaction_matrix(const DropletConfig& config, const GreenEvaluator& g,
                                       int quad_order = 8);

EnergyBreakdown sharp_energy(const DropletConfig& config, const GreenEvaluator& g, int quad_order = 8);

/// Rescaled energy of an all-disk configuration and its gradient with
/// respect to centers and radii (closed forms, no quadrature).
struct DiskEnergyGradient {
  double energy = 0.0;
  std::vector<Vec2> centers;
  std::vector<double> radii;
};
DiskEnergyGradient disk_energy_gradient(const DropletConfig& config, const GreenEvaluator& g);

}  // namespace okdrop
