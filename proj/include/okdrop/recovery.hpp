#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "okdrop/droplet.hpp"
#include "okdrop/params.hpp"

namespace okdrop {

struct RecoveryCell {
  int ix = 0;
  int iy = 0;
  double mass = 0.0;  // mu(K_i)
  int count = 0;      // N_{K_i}
};

struct RecoveryPlan {
  double epsilon = 0.0;
  TorusParams params;
  double eta = 0.0;
  int cells_per_side = 0;
  std::vector<RecoveryCell> cells;
  double radius = 0.0;
  double min_spacing = 0.0;
  std::uint64_t seed = 0;
  bool floored = false;  // density was floored to make it positive

  int total_count() const;
};

/// Cell side eta = ell / k, k = ceil(ell |ln eps|^{1/4}), nudged so that
/// |ln eps|^{-1/2} < eta < 1; throws ConstructionError if no integer k fits.
int recovery_cells_per_side(double epsilon, double ell);

RecoveryPlan partition_counts(const DensityMeasure& mu, double epsilon, const TorusParams& params,
                              std::uint64_t seed = 0);

/// Centers on a jittered sub-grid in each cell; reproducible from the plan seed.
std::vector<Vec2> place_droplets(const RecoveryPlan& plan);

DropletConfig build_recovery(const DensityMeasure& mu, double epsilon, const TorusParams& params,
                             std::uint64_t seed);

/// Deterministic 64-bit generator (SplitMix64) with 53-bit uniform doubles.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();  // [0, 1)
 private:
  std::uint64_t state_;
};

}  // namespace okdrop
