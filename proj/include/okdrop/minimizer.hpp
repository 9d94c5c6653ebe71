#pragma once

#include <ostream>
#include <vector>

#include "okdrop/droplet.hpp"
#include "okdrop/green.hpp"

namespace okdrop {

struct TraceRow {
  int step = 0;
  double energy = 0.0;        // rescaled energy
  double max_gradient = 0.0;
  double min_distance = 0.0;  // smallest center-to-center torus distance
  double area_mean = 0.0;     // rescaled areas
  double area_std = 0.0;
};

struct RelaxResult {
  DropletConfig config;
  std::vector<TraceRow> trace;
  bool converged = false;
};

/// Gradient descent of the rescaled energy in the disk centers, with
/// backtracking. `step` is the initial largest center displacement.
RelaxResult relax_centers(const DropletConfig& config, const GreenEvaluator& g, int max_steps, double step);

/// Gradient descent in the disk radii with centers held fixed; radii are
/// floored at 1e-3 of the optimal radius.
RelaxResult relax_areas(const DropletConfig& config, const GreenEvaluator& g, int max_steps);

/// Alternating center and radius passes until neither pass moves.
RelaxResult relax_joint(const DropletConfig& config, const GreenEvaluator& g, int rounds, int steps_per_pass,
                        double step);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

/// phi_rho: 0 below rho/2, 1 above rho, cubic smoothstep in between.
double cutoff_phi(double r, double rho);

/// 2 int int G phi_rho dmu dmu for a configuration.
double truncated_interaction(const DropletConfig& config, const GreenEvaluator& g, double rho);

/// Lower-bound defect M^eps.
double defect_M(const DropletConfig& config, const GreenEvaluator& g, double gamma, double eta, double rho);

struct EnsembleStats {
  double gamma = 0.0;
  int in_window_count = 0;
  double area_mean = 0.0;
  double area_variance = 0.0;
  double out_window_mass = 0.0;
  double deficit_sum = 0.0;
  double count_density = 0.0;
};

EnsembleStats ensemble_stats(const DropletConfig& config, double gamma);

/// Coefficient of variation of nearest-neighbour torus distances between centers.
double nearest_neighbor_cv(const DropletConfig& config);

/// Area of the intersection of two disks with radii a, b at center distance d.
double lens_area(double a, double b, double d);

}  // namespace okdrop
