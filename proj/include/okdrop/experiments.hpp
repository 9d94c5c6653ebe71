#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "okdrop/diffuse.hpp"
#include "okdrop/green.hpp"
#include "okdrop/params.hpp"

namespace okdrop {

/// One epsilon of the recovery sweep at the optimal constant density.
struct SweepRow {
  double epsilon = 0.0;
  double abs_log = 0.0;
  int count = 0;
  double eta = 0.0;
  double radius = 0.0;
  double mass = 0.0;  // (1/|ln eps|) sum A_i
  double perimeter_term = 0.0;
  double area_term = 0.0;
  double self_interaction = 0.0;
  double pair_interaction = 0.0;
  double energy = 0.0;  // rescaled energy without the background constant
  double target = 0.0;  // E0[mu] minus the background constant
  double gap = 0.0;
  double defect = 0.0;  // M^eps
};

struct SweepOptions {
  std::uint64_t seed = 42;
  double gamma = 1.0 / 6.0;
  double defect_eta = 0.05;
  double rho_fraction = 0.125;  // rho = rho_fraction * ell
  int density_grid = 128;
};

std::vector<SweepRow> recovery_sweep(const TorusParams& params, const std::vector<double>& eps_list,
                                     const GreenEvaluator& g, const SweepOptions& opt = {});

bool gap_strictly_decreasing(const std::vector<SweepRow>& rows);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonReport>& rows);

/// Uniform-start droplet ensemble: n disks on a jittered grid with areas
/// drawn uniformly from [lo, hi] x 3^{2/3} pi.
DropletConfig random_disk_ensemble(const TorusParams& params, double epsilon, int n, double lo, double hi,
                                   std::uint64_t seed);

}  // namespace okdrop
