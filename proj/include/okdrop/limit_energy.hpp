#pragma once

#include <functional>
#include <vector>

#include "okdrop/droplet.hpp"
#include "okdrop/params.hpp"

namespace okdrop {

/// Solution v of -Laplace v + kappa^2 v = mu on the density grid.
struct PotentialField {
  TorusParams params;
  int n = 0;
  std::vector<double> grid;
  bool atoms_smeared = false;  // atoms were spread over one cell before solving

  double cell_area() const { return (params.ell / n) * (params.ell / n); }
  double integral() const;
};

PotentialField solve_potential(const DensityMeasure& mu, const TorusParams& params);

struct CoulombRoutes {
  double spectral = 0.0;  // sum |mu_hat|^2 / (kappa^2 + |k|^2)
  double local = 0.0;     // int |grad v|^2 + kappa^2 v^2
};
CoulombRoutes coulomb_routes(const DensityMeasure& mu, const TorusParams& params);

/// int int G dmu dmu; throws ConsistencyError if the two routes differ by more than 1e-6 relative.
double coulomb_energy(const DensityMeasure& mu, const TorusParams& params);

struct LimitEnergyParts {
  double nonlocal = 0.0;  // background + (3^{2/3} - 2 delta_bar / kappa^2) mass + 2 coulomb
  double local = 0.0;     // background + (3^{2/3} kappa^2 - 2 delta_bar) int v + 2 int (|grad v|^2 + kappa^2 v^2)
  double mass = 0.0;
  double coulomb = 0.0;
};
LimitEnergyParts limit_energy_parts(const DensityMeasure& mu, const TorusParams& params);

/// Gamma-limit functional E0[mu]; checks the local form within 1e-8 relative.
double limit_energy(const DensityMeasure& mu, const TorusParams& params);

/// E0 of the constant density m (closed form).
double limit_energy_constant(const TorusParams& params, double m);

struct OptimalDensity {
  double mu_bar = 0.0;
  double min_energy_density = 0.0;
  double delta_c = 0.0;
};
OptimalDensity optimal_constant_density(const TorusParams& params);

struct ProfileValue {
  double f = 0.0;
  double f_second = 0.0;
  double argmin = 0.0;
  double min_value = 0.0;
};
struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search on [a, b] until the bracket is below tol * max(1, |x|).
/// The objective is evaluated in long double: comparisons of double values
/// cannot resolve a smooth minimum much below sqrt(machine epsilon).
ScalarMinimum golden_section_min(const std::function<long double(long double)>& f, double a, double b,
                                 double tol = 1e-12);

/// Numerical minimum of E0 over constant densities m >= 0.
ScalarMinimum minimize_constant_density(const TorusParams& params);

/// Numerical minimum of the profile function on (0.1, 100).
ScalarMinimum minimize_profile();

/// f(x) = 2 sqrt(pi) / sqrt(x) + x / (3 pi), the per-droplet energy per unit area.
ProfileValue droplet_profile_f(double x);

}  // namespace okdrop
