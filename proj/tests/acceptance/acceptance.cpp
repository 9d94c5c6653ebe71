// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "okdrop/diffuse.hpp"
#include "okdrop/droplet.hpp"
#include "okdrop/experiments.hpp"
#include "okdrop/green.hpp"
#include "okdrop/limit_energy.hpp"
#include "okdrop/minimizer.hpp"
#include "okdrop/recovery.hpp"
#include "okdrop/sharp_energy.hpp"

using namespace okdrop;

namespace {

constexpr double kPi = std::numbers::pi;
int g_failed = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void run(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && dt > budget_s) {
    o.pass = false;
    o.detail += fmt(" [over time budget %.0f s]", budget_s);
  }
  if (!o.pass) ++g_failed;
  std::printf("%s  C%-2d %-34s %s  (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt);
  std::fflush(stdout);
}

double delta_c(double kappa) { return 0.5 * kThreeTwoThirds * kappa * kappa; }

}  // namespace

int main(int argc, char** argv) {
  bool scan = true;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--no-scan") == 0) scan = false;

  run(1, "Green identities (512^2)", 10, [] {
    const GreenEvaluator g = build_green(TorusParams{1.0, 1.0, 1.0});
    const auto r = green_selftest(g, 512);
    const double ig = std::abs(r.at("integral_residual"));
    const double hh = r.at("hh_max_residual");
    return Outcome{ig < 1e-6 && hh < 1e-4, fmt("|int G - 1/k^2| = %.2e, max|H*H - G| = %.2e", ig, hh)};
  });

  run(2, "Coulomb energy two routes", 0, [] {
    const TorusParams p{1.0, 2.0 / 3.0, 1.0};
    const int n = 512;
    std::vector<double> g(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double dx = (i + 0.5) / n - 0.4, dy = (j + 0.5) / n - 0.55;
        g[static_cast<std::size_t>(i) * n + j] = 2.0 * std::exp(-(dx * dx + dy * dy) / (2 * 0.04 * 0.04));
      }
    const CoulombRoutes r = coulomb_routes(DensityMeasure::from_grid(1.0, n, std::move(g)), p);
    const double rel = std::abs(r.spectral - r.local) / r.spectral;
    return Outcome{rel < 1e-8, fmt("relative difference %.2e", rel)};
  });

  run(3, "closed-form limit minimizer", 1, [] {
    const TorusParams p{1.0, 2.0 / 3.0, 1.0};
    const double dc = delta_c(p.kappa);
    const double mu = 0.5 * (p.delta_bar - dc);
    const double emin = dc * (2 * p.delta_bar - dc) / (2 * p.kappa * p.kappa);
    const ScalarMinimum s = minimize_constant_density(p);
    const double e1 = std::abs(s.argmin - mu) / mu;
    const double e2 = std::abs(s.value - emin) / emin;
    return Outcome{e1 < 1e-8 && e2 < 1e-8, fmt("mu_bar rel err %.1e, min energy rel err %.1e", e1, e2)};
  });

  run(4, "profile function minimum", 0, [] {
    const ScalarMinimum s = minimize_profile();
    const double e1 = std::abs(s.argmin - kOptimalArea) / kOptimalArea;
    const double e2 = std::abs(s.value - kThreeTwoThirds) / kThreeTwoThirds;
    return Outcome{e1 < 1e-8 && e2 < 1e-8, fmt("argmin rel err %.1e, min rel err %.1e", e1, e2)};
  });

  run(5, "Gamma-limit recovery sweep", 120, [] {
    // ell = 1, kappa = 2/3, delta_bar = 36: see the robustness line below
    const TorusParams p{1.0, 2.0 / 3.0, 36.0};
    const GreenEvaluator g = build_green(p);
    const auto rows = recovery_sweep(p, {1e-3, 1e-6, 1e-9, 1e-12}, g);
    double mmin = 1e300;
    std::string gaps;
    for (const auto& r : rows) {
      mmin = std::min(mmin, r.defect);
      gaps += fmt("%s%.3g(N=%d)", gaps.empty() ? "" : " ", r.gap, r.count);
    }
    const double rel = rows.back().gap / std::abs(rows.back().target);
    const bool ok = gap_strictly_decreasing(rows) && rel < 0.25 && mmin >= -1e-9;
    return Outcome{ok, fmt("gaps %s, rel gap %.2e, min M %.3g", gaps.c_str(), rel, mmin)};
  });

  if (scan) {
    // informational: how often the strict trend survives the floor losses in the counts
    const auto t0 = std::chrono::steady_clock::now();
    int pass = 0, total = 0;
    std::string which;
    for (int db = 10; db <= 45; ++db) {
      const TorusParams p{1.0, 2.0 / 3.0, static_cast<double>(db)};
      try {
        const auto rows = recovery_sweep(p, {1e-3, 1e-6, 1e-9, 1e-12}, build_green(p, 128));
        ++total;
        if (gap_strictly_decreasing(rows)) {
          ++pass;
          which += fmt(" %d", db);
        }
      } catch (const std::exception&) {
        ++total;
      }
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("INFO  C5  strict gap trend holds for %d/%d integer delta_bar in [10, 45]:%s  (%.1f s)\n", pass, total,
                which.c_str(), dt);
  }

  // joint relaxation shared by criteria 6 and 7
  const double eps6 = 1e-8;
  const double L6 = -std::log(eps6);
  const TorusParams p6{1.0, 2.0 / 3.0, delta_c(2.0 / 3.0) + 2.0 * 20 * kOptimalArea / L6};
  RelaxResult relaxed;
  double relax_time = 0;
  {
    const auto t0 = std::chrono::steady_clock::now();
    const GreenEvaluator g = build_green(p6);
    relaxed = relax_joint(random_disk_ensemble(p6, eps6, 20, 0.5, 2.0, 7), g, 20, 200, 0.05);
    relax_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  run(6, "equal-area prediction", 300 - relax_time, [&] {
    const EnsembleStats st = ensemble_stats(relaxed.config, 1.0 / 6.0);
    const double cv = std::sqrt(st.area_variance) / st.area_mean;
    const double off = std::abs(st.area_mean / kOptimalArea - 1);
    const bool ok = st.in_window_count == 20 && cv < 0.05 && std::abs(st.deficit_sum) < 1e-12 && off < 0.15;
    return Outcome{ok, fmt("area std/mean %.1e, deficit %.1e, mean off optimum %.2f%%, relax %.1f s", cv, st.deficit_sum,
                           100 * off, relax_time)};
  });

  run(7, "uniform-distribution prediction", 0, [&] {
    const double cv = nearest_neighbor_cv(relaxed.config);
    return Outcome{cv < 0.15, fmt("nearest-neighbour CV %.2e", cv)};
  });

  run(8, "sharp/diffuse equivalence", 180, [] {
    const TorusParams p{1.0, 2.0 / 3.0, 5.0};
    const GreenEvaluator g = build_green(p);
    auto one = [&](double eps, int n) {
      DropletConfig c;
      c.params = p;
      c.epsilon = eps;
      c.droplets = {Droplet::disk({0.5, 0.5}, Scaling(eps).optimal_radius())};
      return compare_energies(c, g, n, 20, 0.5);
    };
    const ComparisonReport a = one(5e-3, 1024);
    const ComparisonReport b = one(2.5e-3, 2048);
    const bool ok = a.ratio >= 0.7 && a.ratio <= 1.3 && std::abs(b.ratio - 1) < std::abs(a.ratio - 1);
    return Outcome{ok, fmt("ratio %.5f -> %.5f (relaxed %.4f -> %.4f)", a.ratio, b.ratio, a.ratio_relaxed,
                           b.ratio_relaxed)};
  });

  run(9, "truncation fidelity", 0, [] {
    const TorusParams p{1.0, 2.0 / 3.0, 20.0};
    const double eps = 1e-3;
    const double L = -std::log(eps);
    const int n = 128;
    std::vector<double> grid(static_cast<std::size_t>(n) * n);
    const int counts[2][2] = {{3, 3}, {2, 2}};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        grid[static_cast<std::size_t>(i) * n + j] = (counts[i >= n / 2][j >= n / 2] + 0.5) * kOptimalArea / L / 0.25;
    const DropletConfig cfg = build_recovery(DensityMeasure::from_grid(1.0, n, grid), eps, p, 42);
    const PhaseField f = lift_config(cfg, 4096);
    const auto comps = label_components(truncate_field(f).binary, f.n, p.ell);
    double worst = 0;
    for (const auto& c : comps) worst = std::max(worst, std::abs(c.area / cfg.droplets[0].area() - 1));
    const bool ok = cfg.droplets.size() == 10 && comps.size() == 10 && worst < 0.05;
    return Outcome{ok, fmt("%zu droplets, %zu components, worst area error %.1e", cfg.droplets.size(), comps.size(),
                           worst)};
  });

  run(10, "quantitative isoperimetric ineq.", 0, [] {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double eps = 1e-4;
    const Scaling s(eps);
    double worst = 1e300;
    for (int t = 0; t < 100; ++t) {
      const double aspect = 1.0 + 4.0 * u(rng);
      const double b = 0.015 + 0.008 * u(rng);
      const double rot = kPi * u(rng);
      Polygon e;
      for (int k = 0; k < 256; ++k) {
        const double th = 2 * kPi * k / 256;
        const double x = aspect * b * std::cos(th), y = b * std::sin(th);
        e.push_back({x * std::cos(rot) - y * std::sin(rot), x * std::sin(rot) + y * std::cos(rot)});
      }
      const Droplet d = Droplet::polygon({0.5, 0.5}, e);
      const ShapeMetrics m = shape_metrics(d, eps);
      const double rhs = m.fraenkel * m.fraenkel * std::sqrt(s.area * d.area());
      if (rhs > 0) worst = std::min(worst, m.deficit / rhs);
    }
    return Outcome{worst >= 0.05, fmt("min deficit / (alpha^2 sqrt A) = %.3f over 100 ellipses", worst)};
  });

  run(11, "center gradient correctness", 0, [] {
    const TorusParams p{1.0, 2.0 / 3.0, 3.0};
    const GreenEvaluator g = build_green(p);
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const DropletConfig c = random_disk_ensemble(p, 1e-4, 5, 0.5, 2.0, seed);
      const DiskEnergyGradient e = disk_energy_gradient(c, g);
      const double h = 1e-6;
      for (std::size_t i = 0; i < c.droplets.size(); ++i)
        for (int axis = 0; axis < 2; ++axis) {
          DropletConfig cp = c, cm = c;
          (axis == 0 ? cp.droplets[i].center.x : cp.droplets[i].center.y) += h;
          (axis == 0 ? cm.droplets[i].center.x : cm.droplets[i].center.y) -= h;
          const double fd = (disk_energy_gradient(cp, g).energy - disk_energy_gradient(cm, g).energy) / (2 * h);
          const double an = axis == 0 ? e.centers[i].x : e.centers[i].y;
          worst = std::max(worst, std::abs(fd - an) / e.centers[i].norm());
        }
    }
    return Outcome{worst < 1e-4, fmt("max relative error %.1e over 10 configs", worst)};
  });

  std::printf("%s: %d criteria failed\n", g_failed ? "FAILED" : "ALL PASSED", g_failed);
  return g_failed ? 1 : 0;
}
