#include "okdrop/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "okdrop/error.hpp"
#include "okdrop/format.hpp"
#include "okdrop/parallel.hpp"
#include "okdrop/sharp_energy.hpp"
#include "okdrop/special.hpp"

namespace okdrop {

namespace {

constexpr double kPi = std::numbers::pi;

void require_disks(const DropletConfig& c) {
  for (const auto& d : c.droplets)
    if (!d.is_disk()) throw ParameterError("relaxation supports disk droplets only");
}

bool disjoint(const DropletConfig& c) {
  const double ell = c.params.ell;
  for (std::size_t i = 0; i < c.droplets.size(); ++i) {
    if (!(c.droplets[i].radius < 0.25 * ell)) return false;
    for (std::size_t j = i + 1; j < c.droplets.size(); ++j)
      if (droplets_overlap(c.droplets[i], c.droplets[j], ell)) return false;
  }
  return true;
}

TraceRow trace_row(const DropletConfig& c, int step, double energy, double gmax) {
  TraceRow r;
  r.step = step;
  r.energy = energy;
  r.max_gradient = gmax;
  const double ell = c.params.ell;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.droplets.size(); ++i)
    for (std::size_t j = i + 1; j < c.droplets.size(); ++j)
      dmin = std::min(dmin, torus_distance(c.droplets[i].center, c.droplets[j].center, ell));
  r.min_distance = std::isfinite(dmin) ? dmin : 0.0;
  const RescaledStats st = rescaled_stats(c);
  const double n = static_cast<double>(st.areas.size());
  if (n > 0) {
    double m = 0.0;
    for (double a : st.areas) m += a;
    m /= n;
    double v = 0.0;
    for (double a : st.areas) v += (a - m) * (a - m);
    r.area_mean = m;
    r.area_std = std::sqrt(v / n);
  }
  return r;
}

double max_norm(const std::vector<Vec2>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, x.norm());
  return m;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

RelaxResult relax_centers(const DropletConfig& config, const GreenEvaluator& g, int max_steps, double step) {
  require_disks(config);
  config.validate();
  if (!(step > 0.0)) throw ParameterError("step must be > 0");
  RelaxResult res;
  res.config = config;
  DiskEnergyGradient cur = disk_energy_gradient(res.config, g);
  double gmax = max_norm(cur.centers);
  res.trace.push_back(trace_row(res.config, 0, cur.energy, gmax));
  const double ell = config.params.ell;
  double len = std::min(step, 0.05 * ell);
  for (int it = 1; it <= max_steps; ++it) {
    if (gmax < 1e-8 || config.droplets.size() < 2) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    while (len > 1e-15 * ell) {
      DropletConfig trial = res.config;
      for (std::size_t i = 0; i < trial.droplets.size(); ++i)
        trial.droplets[i].center =
            wrap_point(trial.droplets[i].center - cur.centers[i] * (len / gmax), ell);
      if (disjoint(trial)) {
        DiskEnergyGradient next = disk_energy_gradient(trial, g);
        if (next.energy <= cur.energy) {
          res.config = std::move(trial);
          cur = std::move(next);
          accepted = true;
          len *= 1.25;
          break;
        }
      }
      len *= 0.5;
    }
    if (!accepted) {
      res.converged = true;
      break;
    }
    gmax = max_norm(cur.centers);
    res.trace.push_back(trace_row(res.config, it, cur.energy, gmax));
  }
  if (!disjoint(res.config)) throw RelaxationError("center relaxation produced overlapping droplets");
  return res;
}

RelaxResult relax_areas(const DropletConfig& config, const GreenEvaluator& g, int max_steps) {
  require_disks(config);
  config.validate();
  const Scaling s = config.scaling();
  const double rfloor = 1e-3 * s.optimal_radius();
  RelaxResult res;
  res.config = config;
  DiskEnergyGradient cur = disk_energy_gradient(res.config, g);
  // Work with rescaled radii L * a so the step is O(1).
  auto projected = [&](const DropletConfig& c, const DiskEnergyGradient& e) {
    std::vector<double> gr(e.radii.size());
    for (std::size_t i = 0; i < gr.size(); ++i) {
      gr[i] = e.radii[i] / s.length;
      if (c.droplets[i].radius <= rfloor && gr[i] > 0.0) gr[i] = 0.0;
    }
    return gr;
  };
  std::vector<double> gr = projected(res.config, cur);
  double gmax = max_abs(gr);
  res.trace.push_back(trace_row(res.config, 0, cur.energy, gmax));
  double len = 0.1 * kCbrt3;
  for (int it = 1; it <= max_steps; ++it) {
    if (gmax < 1e-10) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    while (len > 1e-14) {
      DropletConfig trial = res.config;
      for (std::size_t i = 0; i < trial.droplets.size(); ++i) {
        const double rescaled = trial.droplets[i].radius * s.length - gr[i] * (len / gmax);
        trial.droplets[i].radius = std::max(rfloor, rescaled / s.length);
      }
      if (disjoint(trial)) {
        DiskEnergyGradient next = disk_energy_gradient(trial, g);
        if (next.energy <= cur.energy) {
          res.config = std::move(trial);
          cur = std::move(next);
          accepted = true;
          len *= 1.25;
          break;
        }
      }
      len *= 0.5;
    }
    if (!accepted) {
      res.converged = true;
      break;
    }
    gr = projected(res.config, cur);
    gmax = max_abs(gr);
    res.trace.push_back(trace_row(res.config, it, cur.energy, gmax));
  }
  return res;
}

RelaxResult relax_joint(const DropletConfig& config, const GreenEvaluator& g, int rounds, int steps_per_pass,
                        double step) {
  RelaxResult res;
  res.config = config;
  int offset = 0;
  for (int r = 0; r < rounds; ++r) {
    const RelaxResult a = relax_areas(res.config, g, steps_per_pass);
    const RelaxResult c = relax_centers(a.config, g, steps_per_pass, step);
    for (const RelaxResult* part : {&a, &c})
      for (std::size_t k = (res.trace.empty() ? 0 : 1); k < part->trace.size(); ++k) {
        TraceRow row = part->trace[k];
        row.step = offset++;
        res.trace.push_back(row);
      }
    res.config = c.config;
    const bool still = a.trace.size() <= 1 && c.trace.size() <= 1;
    if (still) {
      res.converged = true;
      break;
    }
  }
  return res;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "step,energy,max_gradient,min_distance,area_mean,area_std\n";
  for (const auto& r : trace)
    out << r.step << ',' << fmt17(r.energy) << ',' << fmt17(r.max_gradient) << ',' << fmt17(r.min_distance)
        << ',' << fmt17(r.area_mean) << ',' << fmt17(r.area_std) << '\n';
}

double cutoff_phi(double r, double rho) {
  const double t = std::clamp((r - 0.5 * rho) / (0.5 * rho), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

double lens_area(double a, double b, double d) {
  if (d >= a + b) return 0.0;
  if (d <= std::abs(a - b)) {
    const double m = std::min(a, b);
    return kPi * m * m;
  }
  const double ca = std::clamp((d * d + a * a - b * b) / (2.0 * d * a), -1.0, 1.0);
  const double cb = std::clamp((d * d + b * b - a * a) / (2.0 * d * b), -1.0, 1.0);
  const double k = (-d + a + b) * (d + a - b) * (d - a + b) * (d + a + b);
  return a * a * std::acos(ca) + b * b * std::acos(cb) - 0.5 * std::sqrt(std::max(0.0, k));
}

namespace {

// int int_{Di x Dj} G(x - y) phi(|x - y|) as an integral over the offset u of
// the lens area |Di cap (Dj + d + u)|.
double disk_pair_truncated(const Droplet& a, const Droplet& b, const GreenEvaluator& g, double rho) {
  const double ell = g.params().ell;
  const Vec2 d = min_image(a.center - b.center, ell);
  const double dist = d.norm();
  const double reach = a.radius + b.radius;
  if (dist - reach >= rho) {
    const double kappa = g.params().kappa;
    return disk_charge(kappa, a.radius) * disk_charge(kappa, b.radius) * g.value(d);
  }
  if (dist + reach <= 0.5 * rho) return 0.0;
  std::vector<double> cuts{0.0, std::abs(a.radius - b.radius), reach};
  if (dist == 0.0) {
    cuts.push_back(std::min(0.5 * rho, reach));
    cuts.push_back(std::min(rho, reach));
  }
  std::sort(cuts.begin(), cuts.end());
  const int nr = 40;
  const int nt = 128;
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    if (cuts[s + 1] - cuts[s] <= 0.0) continue;
    const MappedRule rule = gauss_on_interval(nr, cuts[s], cuts[s + 1]);
    for (int k = 0; k < nr; ++k) {
      const double t = rule.x[k];
      const double lens = lens_area(a.radius, b.radius, t);
      if (lens <= 0.0) continue;
      double ring = 0.0;
      for (int m = 0; m < nt; ++m) {
        const double th = 2.0 * kPi * (m + 0.5) / nt;
        const Vec2 sv = min_image(d + Vec2{t * std::cos(th), t * std::sin(th)}, ell);
        const double r = sv.norm();
        const double phi = cutoff_phi(r, rho);
        if (phi > 0.0) ring += g.value(sv) * phi;
      }
      total += rule.w[k] * t * lens * ring * (2.0 * kPi / nt);
    }
  }
  return total;
}

double general_pair_truncated(const Droplet& a, const Droplet& b, const GreenEvaluator& g, double rho) {
  const double ell = g.params().ell;
  const QuadRule qa = droplet_quadrature(a, 12);
  const QuadRule qb = droplet_quadrature(b, 12);
  double s = 0.0;
  for (std::size_t i = 0; i < qa.x.size(); ++i)
    for (std::size_t j = 0; j < qb.x.size(); ++j) {
      const Vec2 sv = min_image(qa.x[i] - qb.x[j], ell);
      const double phi = cutoff_phi(sv.norm(), rho);
      if (phi > 0.0) s += qa.w[i] * qb.w[j] * g.value(sv) * phi;
    }
  return s;
}

}  // namespace

double truncated_interaction(const DropletConfig& config, const GreenEvaluator& g, double rho) {
  const std::size_t n = config.droplets.size();
  const Scaling s = config.scaling();
  const double c2 = 2.0 * s.density * s.density;
  std::vector<double> rows(n, 0.0);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const Droplet& di = config.droplets[i];
        const Droplet& dj = config.droplets[j];
        const double v = (di.is_disk() && dj.is_disk()) ? disk_pair_truncated(di, dj, g, rho)
                                                        : general_pair_truncated(di, dj, g, rho);
        rows[i] += (i == j ? 1.0 : 2.0) * c2 * v;
      }
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

double defect_M(const DropletConfig& config, const GreenEvaluator& g, double gamma, double eta, double rho) {
  const double ell = config.params.ell;
  if (!(rho > 0.0 && rho < 0.25 * ell)) throw ParameterError("rho must lie in (0, ell/4)");
  if (!(gamma > 0.0 && gamma < 1.0 / 3.0)) throw ParameterError("gamma must lie in (0, 1/3)");
  if (!(eta > 0.0)) throw ParameterError("eta must be > 0");
  if (config.droplets.empty()) return 0.0;
  const EnergyBreakdown e = sharp_energy(config, g);
  const RescaledStats st = rescaled_stats(config);
  const Scaling s = config.scaling();
  const TorusParams& p = config.params;
  double sa = 0.0;
  for (double a : st.areas) sa += a;
  const double lin = (kThreeTwoThirds - 2.0 * p.delta_bar / (p.kappa * p.kappa) - eta) * sa / s.abs_log;
  return e.total_rescaled - lin - truncated_interaction(config, g, rho);
}

EnsembleStats ensemble_stats(const DropletConfig& config, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in (0, 1)");
  const RescaledStats st = rescaled_stats(config);
  const Scaling s = config.scaling();
  EnsembleStats out;
  out.gamma = gamma;
  const double lo = kOptimalArea * gamma;
  const double hi = kOptimalArea / gamma;
  std::vector<double> in;
  for (std::size_t i = 0; i < st.areas.size(); ++i) {
    const double a = st.areas[i];
    if (a >= lo && a <= hi)
      in.push_back(a);
    else
      out.out_window_mass += a / s.abs_log;
    out.deficit_sum += shape_metrics(config.droplets[i], config.epsilon).deficit / s.abs_log;
  }
  out.in_window_count = static_cast<int>(in.size());
  if (!in.empty()) {
    double m = 0.0;
    for (double a : in) m += a;
    m /= static_cast<double>(in.size());
    double v = 0.0;
    for (double a : in) v += (a - m) * (a - m);
    out.area_mean = m;
    out.area_variance = v / static_cast<double>(in.size());
  }
  out.count_density = kOptimalArea * out.in_window_count / s.abs_log;
  return out;
}

double nearest_neighbor_cv(const DropletConfig& config) {
  const std::size_t n = config.droplets.size();
  if (n < 2) return 0.0;
  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        nn[i] = std::min(nn[i], torus_distance(config.droplets[i].center, config.droplets[j].center,
                                               config.params.ell));
  double m = 0.0;
  for (double d : nn) m += d;
  m /= static_cast<double>(n);
  double v = 0.0;
  for (double d : nn) v += (d - m) * (d - m);
  return std::sqrt(v / static_cast<double>(n)) / m;
}

}  // namespace okdrop
