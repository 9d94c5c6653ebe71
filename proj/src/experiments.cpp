#include "okdrop/experiments.hpp"

#include <cmath>
#include <numbers>

#include "okdrop/error.hpp"
#include "okdrop/format.hpp"
#include "okdrop/limit_energy.hpp"
#include "okdrop/minimizer.hpp"
#include "okdrop/recovery.hpp"
#include "okdrop/sharp_energy.hpp"

namespace okdrop {

std::vector<SweepRow> recovery_sweep(const TorusParams& params, const std::vector<double>& eps_list,
                                     const GreenEvaluator& g, const SweepOptions& opt) {
  params.validate();
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    Scaling check(eps_list[i]);
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw ParameterError("epsilon list must be strictly decreasing");
  }
  const OptimalDensity od = optimal_constant_density(params);
  const DensityMeasure mu = DensityMeasure::constant(params.ell, opt.density_grid, od.mu_bar);
  const double target = limit_energy_constant(params, od.mu_bar) - params.background_energy();
  std::vector<SweepRow> rows;
  for (double eps : eps_list) {
    const DropletConfig cfg = build_recovery(mu, eps, params, opt.seed);
    const RecoveryPlan plan = partition_counts(mu, eps, params, opt.seed);
    const Scaling s(eps);
    SweepRow r;
    r.epsilon = eps;
    r.abs_log = s.abs_log;
    r.count = static_cast<int>(cfg.droplets.size());
    r.eta = plan.eta;
    r.radius = plan.radius;
    for (const auto& d : cfg.droplets) r.mass += s.area * d.area() / s.abs_log;
    r.target = target;
    if (!cfg.droplets.empty()) {
      const EnergyBreakdown e = sharp_energy(cfg, g);
      r.perimeter_term = e.perimeter_term;
      r.area_term = e.area_term;
      r.self_interaction = e.self_interaction;
      r.pair_interaction = e.pair_interaction;
      r.energy = e.total_rescaled;
      r.defect = defect_M(cfg, g, opt.gamma, opt.defect_eta, opt.rho_fraction * params.ell);
    }
    r.gap = std::abs(r.energy - r.target);
    rows.push_back(r);
  }
  return rows;
}

bool gap_strictly_decreasing(const std::vector<SweepRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].gap < rows[i - 1].gap)) return false;
  return true;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "epsilon,abs_log,N,eta,r,mass,perimeter_term,area_term,self,pair,energy,E0_target,gap\n";
  for (const auto& r : rows)
    out << fmt17(r.epsilon) << ',' << fmt17(r.abs_log) << ',' << r.count << ',' << fmt17(r.eta) << ','
        << fmt17(r.radius) << ',' << fmt17(r.mass) << ',' << fmt17(r.perimeter_term) << ','
        << fmt17(r.area_term) << ',' << fmt17(r.self_interaction) << ',' << fmt17(r.pair_interaction) << ','
        << fmt17(r.energy) << ',' << fmt17(r.target) << ',' << fmt17(r.gap) << '\n';
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonReport>& rows) {
  out << "epsilon,grid,E_sharp,E_diffuse,ratio\n";
  for (const auto& r : rows)
    out << fmt17(r.epsilon) << ',' << r.grid << ',' << fmt17(r.sharp_energy) << ',' << fmt17(r.diffuse_energy)
        << ',' << fmt17(r.ratio) << '\n';
}

DropletConfig random_disk_ensemble(const TorusParams& params, double epsilon, int n, double lo, double hi,
                                   std::uint64_t seed) {
  params.validate();
  if (n < 1) throw ParameterError("ensemble size must be >= 1");
  const Scaling s(epsilon);
  SplitMix64 rng(seed);
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const double d = params.ell / side;
  DropletConfig cfg;
  cfg.params = params;
  cfg.epsilon = epsilon;
  for (int k = 0; k < n; ++k) {
    const double a = kOptimalArea * (lo + (hi - lo) * rng.uniform());
    const double r = std::sqrt(a / std::numbers::pi) / s.length;
    const Vec2 base{(k / side + 0.5) * d, (k % side + 0.5) * d};
    const double amp = std::max(0.0, 0.5 * d - r) * 0.5;
    const Vec2 jit{amp * (2.0 * rng.uniform() - 1.0), amp * (2.0 * rng.uniform() - 1.0)};
    cfg.droplets.push_back(Droplet::disk(wrap_point(base + jit, params.ell), r));
  }
  cfg.validate();
  return cfg;
}

}  // namespace okdrop
