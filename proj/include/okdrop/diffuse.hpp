#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "okdrop/droplet.hpp"
#include "okdrop/green.hpp"

namespace okdrop {

/// Order parameter u on an n x n periodic grid; sample (i, j) sits at the
/// cell center ((i + 1/2) h, (j + 1/2) h).
struct PhaseField {
  TorusParams params;
  double epsilon = 0.0;
  int n = 0;
  std::vector<double> u;
  bool mass_constrained = false;

  double cell_size() const { return params.ell / n; }
  double mean() const;
  double sup_norm() const;
};

/// W(u) = (9/32)(1 - u^2)^2.
double double_well(double u);
double double_well_derivative(double u);

struct DoubleWellReport {
  double lambda = 0.0;
  double well_scale = 0.0;       // lambda^2 / 4, the coefficient of (1 - u^2)^2
  double length_factor = 0.0;    // ell = lambda * ell_tilde
  double epsilon_factor = 0.0;   // eps = lambda^2 * eps_tilde
  double well_at_one = 0.0;      // W(1)
  double well_second_at_one = 0.0;
  double implied_kappa = 0.0;    // 1 / sqrt(W''(1))
  double profile_integral = 0.0; // int_{-1}^{1} sqrt(2 W) du
  bool normalized = false;       // W(1) = 0, W''(1) = 9/4, integral = 1
};

/// Rescaling u-space well (1/4)(1 - u^2)^2 by lambda; lambda = 3/(2 sqrt 2) gives W.
DoubleWellReport normalize_double_well(double lambda);

struct DiffuseEnergy {
  double gradient_term = 0.0;
  double well_term = 0.0;
  double nonlocal_term = 0.0;
  double total = 0.0;
  double rescaled = 0.0;       // total * eps^{-4/3} |ln eps|^{-2/3}
  bool under_resolved = false; // fewer than 2 cells per eps
};

DiffuseEnergy diffuse_energy(const PhaseField& field);

/// Mean value -1 + eps^{2/3} |ln eps|^{1/3} delta_bar of admissible fields.
double field_background(const PhaseField& field);

/// tanh(3 d / (4 eps)) profile of the signed distance, then a smooth shift
/// s (1 - u) / 2 that leaves the droplet cores and sup|u| <= 1 intact.
PhaseField lift_config(const DropletConfig& config, int grid_n);

struct Truncation {
  std::vector<std::uint8_t> binary;
  DensityMeasure mu0;
};
Truncation truncate_field(const PhaseField& field);

/// Area of {-1 + delta <= u <= 1 - delta}.
double interface_volume(const PhaseField& field, double delta);

/// Stabilized semi-implicit L2 gradient flow with the mean held fixed.
/// Throws StepSizeError if the energy rises. Energies per step go to `energies` if given.
PhaseField relax_field(const PhaseField& field, int steps, double dt, std::vector<double>* energies = nullptr);

struct ComparisonReport {
  double epsilon = 0.0;
  int grid = 0;
  double sharp_energy = 0.0;   // physical E^eps
  double diffuse_energy = 0.0; // physical diffuse energy of the lift
  double ratio = 0.0;
  double diffuse_relaxed = 0.0;
  double ratio_relaxed = 0.0;
  bool kappa_matches_well = false;
};

ComparisonReport compare_energies(const DropletConfig& config, const GreenEvaluator& g, int grid_n,
                                  int relax_steps = 20, double dt = 0.5);

/// Text header line "okdrop-phase-field n ell kappa delta_bar epsilon mass_flag" then n*n doubles.
void save_phase_field(const std::string& path, const PhaseField& field);
PhaseField load_phase_field(const std::string& path);

}  // namespace okdrop
