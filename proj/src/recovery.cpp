#include "okdrop/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "okdrop/error.hpp"

namespace okdrop {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

int RecoveryPlan::total_count() const {
  int s = 0;
  for (const auto& c : cells) s += c.count;
  return s;
}

int recovery_cells_per_side(double epsilon, double ell) {
  const Scaling s(epsilon);
  const double lo = 1.0 / std::sqrt(s.abs_log);
  int k = std::max(1, static_cast<int>(std::ceil(ell * std::pow(s.abs_log, 0.25))));
  auto fits = [&](int kk) {
    const double eta = ell / kk;
    return eta > lo && eta < 1.0;
  };
  if (fits(k)) return k;
  for (int d = 1; d < 1000000; ++d) {
    if (k - d >= 1 && fits(k - d)) return k - d;
    if (fits(k + d)) return k + d;
    if (ell / (k + d) <= lo && (k - d < 1 || ell / (k - d) >= 1.0)) break;
  }
  throw ConstructionError("no cell size fits the window |ln eps|^{-1/2} < eta < 1 for this ell");
}

namespace {

// Mass of [x0, x0+w) x [y0, y0+w) under the piecewise-constant density.
double cell_mass(const DensityMeasure& mu, double x0, double y0, double w) {
  const double h = mu.cell_size();
  const int n = mu.n;
  const int i0 = static_cast<int>(std::floor(x0 / h));
  const int i1 = static_cast<int>(std::ceil((x0 + w) / h));
  const int j0 = static_cast<int>(std::floor(y0 / h));
  const int j1 = static_cast<int>(std::ceil((y0 + w) / h));
  double s = 0.0;
  for (int i = i0; i < i1; ++i) {
    const double ox = std::min((i + 1) * h, x0 + w) - std::max(i * h, x0);
    if (ox <= 0.0) continue;
    const int ii = ((i % n) + n) % n;
    for (int j = j0; j < j1; ++j) {
      const double oy = std::min((j + 1) * h, y0 + w) - std::max(j * h, y0);
      if (oy <= 0.0) continue;
      const int jj = ((j % n) + n) % n;
      s += mu.grid[static_cast<std::size_t>(ii) * n + jj] * ox * oy;
    }
  }
  return s;
}

std::uint64_t cell_seed(std::uint64_t seed, int ix, int iy) {
  SplitMix64 g(seed ^ (0x632be59bd9b4e019ULL * (static_cast<std::uint64_t>(ix) + 1)) ^
               (0x85157af5ULL * (static_cast<std::uint64_t>(iy) + 7)));
  return g.next();
}

}  // namespace

RecoveryPlan partition_counts(const DensityMeasure& mu0, double epsilon, const TorusParams& params,
                              std::uint64_t seed) {
  params.validate();
  const Scaling sc(epsilon);
  RecoveryPlan plan;
  plan.epsilon = epsilon;
  plan.params = params;
  plan.seed = seed;
  plan.radius = sc.optimal_radius();
  const double ell = params.ell;
  const int k = recovery_cells_per_side(epsilon, ell);
  plan.cells_per_side = k;
  plan.eta = ell / k;

  DensityMeasure mu = mu0.atoms.empty() ? mu0 : mu0.smeared();
  const double mass = mu.grid_mass();
  if (!(mass > 0.0)) return plan;
  // Keep the density bounded below: mix in a sliver of its mean (mass preserving).
  const double gmin = *std::min_element(mu.grid.begin(), mu.grid.end());
  if (!(gmin > 0.0)) {
    const double theta = 1e-3;
    const double mean = mass / (ell * ell);
    for (double& v : mu.grid) v = (1.0 - theta) * v + theta * mean;
    plan.floored = true;
  }
  for (int ix = 0; ix < k; ++ix)
    for (int iy = 0; iy < k; ++iy) {
      RecoveryCell c;
      c.ix = ix;
      c.iy = iy;
      c.mass = cell_mass(mu, ix * plan.eta, iy * plan.eta, plan.eta);
      c.count = static_cast<int>(std::floor(sc.abs_log * c.mass / kOptimalArea));
      plan.cells.push_back(c);
    }
  double dmin = plan.eta;
  for (const auto& c : plan.cells) {
    if (c.count <= 1) continue;
    const int s = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(c.count))));
    dmin = std::min(dmin, plan.eta / s);
  }
  plan.min_spacing = 0.5 * dmin;
  return plan;
}

std::vector<Vec2> place_droplets(const RecoveryPlan& plan) {
  std::vector<Vec2> centers;
  const double eta = plan.eta;
  for (const auto& c : plan.cells) {
    if (c.count <= 0) continue;
    const Vec2 origin{c.ix * eta, c.iy * eta};
    if (c.count == 1) {
      centers.push_back(origin + Vec2{0.5 * eta, 0.5 * eta});
      continue;
    }
    const int s = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(c.count))));
    const double d = eta / s;
    if (0.5 * d < plan.min_spacing * (1.0 - 1e-12) || d <= 2.0 * plan.radius)
      throw ConstructionError("cell (" + std::to_string(c.ix) + ", " + std::to_string(c.iy) +
                              ") cannot hold " + std::to_string(c.count) + " droplets at the required spacing");
    SplitMix64 rng(cell_seed(plan.seed, c.ix, c.iy));
    std::vector<int> sites(static_cast<std::size_t>(s) * s);
    std::iota(sites.begin(), sites.end(), 0);
    // Fisher-Yates with the cell generator; the first count sites are used.
    for (std::size_t i = sites.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
      std::swap(sites[i], sites[std::min(j, i)]);
    }
    // Jitter keeps neighbours at least max(min_spacing, 2r) apart.
    const double amp = std::min(d / (4.0 * std::sqrt(2.0)), 0.99 * (d - 2.0 * plan.radius) / (2.0 * std::sqrt(2.0)));
    const std::size_t first = centers.size();
    for (int t = 0; t < c.count; ++t) {
      const int site = sites[t];
      const Vec2 base = origin + Vec2{(site / s + 0.5) * d, (site % s + 0.5) * d};
      const Vec2 jitter{amp * (2.0 * rng.uniform() - 1.0), amp * (2.0 * rng.uniform() - 1.0)};
      Vec2 p = base + jitter;
      for (std::size_t q = first; q < centers.size(); ++q)
        if ((centers[q] - p).norm() < std::max(plan.min_spacing, 2.0 * plan.radius)) {
          p = base;
          break;
        }
      centers.push_back(p);
    }
  }
  for (auto& p : centers) p = wrap_point(p, plan.params.ell);
  return centers;
}

DropletConfig build_recovery(const DensityMeasure& mu, double epsilon, const TorusParams& params,
                             std::uint64_t seed) {
  const RecoveryPlan plan = partition_counts(mu, epsilon, params, seed);
  DropletConfig cfg;
  cfg.params = params;
  cfg.epsilon = epsilon;
  for (const Vec2& c : place_droplets(plan)) cfg.droplets.push_back(Droplet::disk(c, plan.radius));
  try {
    cfg.validate();
  } catch (const GeometryError& e) {
    throw ConstructionError(std::string("recovery placement is not disjoint: ") + e.what());
  }
  return cfg;
}

}  // namespace okdrop
