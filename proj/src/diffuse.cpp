#include "okdrop/diffuse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "okdrop/error.hpp"
#include "okdrop/fft.hpp"
#include "okdrop/format.hpp"
#include "okdrop/sharp_energy.hpp"
#include "okdrop/special.hpp"

namespace okdrop {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kStabilizer = 9.0 / 4.0;

double k_squared(int i, int j, int n, double dk) {
  const double a = dk * fft_freq(i, n);
  const double b = dk * fft_freq(j, n);
  return a * a + b * b;
}

}  // namespace

namespace {

// Neumaier-compensated sum; plain accumulation drifts past 1e-10 on 4096^2 grids.
template <class F>
double accurate_sum(const std::vector<double>& xs, F f) {
  double s = 0.0;
  double c = 0.0;
  for (double x : xs) {
    const double v = f(x);
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  return s + c;
}

}  // namespace

double PhaseField::mean() const {
  return accurate_sum(u, [](double v) { return v; }) / static_cast<double>(u.size());
}

double PhaseField::sup_norm() const {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

double double_well(double u) {
  const double w = 1.0 - u * u;
  return 9.0 / 32.0 * w * w;
}

double double_well_derivative(double u) { return -9.0 / 8.0 * u * (1.0 - u * u); }

DoubleWellReport normalize_double_well(double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be > 0");
  DoubleWellReport r;
  r.lambda = lambda;
  r.well_scale = lambda * lambda / 4.0;
  r.length_factor = lambda;
  r.epsilon_factor = lambda * lambda;
  // W(u) = c (1 - u^2)^2: W(1) = 0, W''(1) = 8c, sqrt(2W) = sqrt(2c)(1 - u^2).
  r.well_at_one = 0.0;
  r.well_second_at_one = 8.0 * r.well_scale;
  r.implied_kappa = 1.0 / std::sqrt(r.well_second_at_one);
  const MappedRule q = gauss_on_interval(8, -1.0, 1.0);
  for (std::size_t k = 0; k < q.x.size(); ++k) {
    const double w = r.well_scale * (1.0 - q.x[k] * q.x[k]) * (1.0 - q.x[k] * q.x[k]);
    r.profile_integral += q.w[k] * std::sqrt(2.0 * w);
  }
  r.normalized = std::abs(r.well_scale - 9.0 / 32.0) < 1e-12 && std::abs(r.profile_integral - 1.0) < 1e-12 &&
                 std::abs(r.well_second_at_one - 9.0 / 4.0) < 1e-12;
  return r;
}

double field_background(const PhaseField& field) { return background_density(field.epsilon, field.params); }

DiffuseEnergy diffuse_energy(const PhaseField& field) {
  if (!field.mass_constrained) throw ConstraintError("diffuse energy needs a mass-constrained field");
  const int n = field.n;
  if (n < 4 || field.u.size() != static_cast<std::size_t>(n) * n) throw ParameterError("bad field grid");
  const double ubar = field_background(field);
  if (std::abs(field.mean() - ubar) > 1e-10)
    throw ConstraintError("field mean differs from the background value");
  const double ell = field.params.ell;
  const double h = ell / n;
  const double dk = 2.0 * kPi / ell;
  const double eps = field.epsilon;
  DiffuseEnergy e;
  e.under_resolved = eps / h < 2.0;
  for (double v : field.u) e.well_term += double_well(v);
  e.well_term *= h * h;
  std::vector<cplx> c(field.u.begin(), field.u.end());
  Fft2 plan(n);
  plan.forward(c);
  // Fourier integrals are h^2 times the DFT; Parseval carries 1/ell^2.
  const double norm = h * h * h * h / (ell * ell);
  double grad = 0.0;
  double nonlocal = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double kk = k_squared(i, j, n, dk);
      const double p = std::norm(c[static_cast<std::size_t>(i) * n + j]);
      grad += kk * p;
      if (kk > 0.0) nonlocal += p / kk;
    }
  e.gradient_term = 0.5 * eps * eps * grad * norm;
  e.nonlocal_term = 0.5 * nonlocal * norm;
  e.total = e.gradient_term + e.well_term + e.nonlocal_term;
  e.rescaled = e.total / Scaling(eps).energy;
  return e;
}

PhaseField lift_config(const DropletConfig& config, int grid_n) {
  config.validate();
  if (grid_n < 16) throw ParameterError("grid_n must be >= 16");
  const double ell = config.params.ell;
  const double eps = config.epsilon;
  const double h = ell / grid_n;
  for (std::size_t i = 0; i < config.droplets.size(); ++i)
    for (std::size_t j = i + 1; j < config.droplets.size(); ++j) {
      const Droplet& a = config.droplets[i];
      const Droplet& b = config.droplets[j];
      double gap = 0.0;
      if (a.is_disk() && b.is_disk()) {
        gap = torus_distance(a.center, b.center, ell) - a.radius - b.radius;
      } else {
        // Boundary-to-boundary distance, sampled on the vertices and a fine boundary walk.
        gap = std::numeric_limits<double>::infinity();
        for (const auto* pr : {&a, &b}) {
          const Droplet& p = *pr;
          const Droplet& o = (pr == &a) ? b : a;
          const int m = 256;
          for (int k = 0; k < m; ++k) {
            Vec2 pt;
            if (p.is_disk()) {
              const double th = 2.0 * kPi * k / m;
              pt = p.center + Vec2{p.radius * std::cos(th), p.radius * std::sin(th)};
            } else {
              const std::size_t nv = p.vertices.size();
              const double t = static_cast<double>(k) * nv / m;
              const std::size_t e = static_cast<std::size_t>(t) % nv;
              const double f = t - std::floor(t);
              pt = p.center + p.vertices[e] * (1.0 - f) + p.vertices[(e + 1) % nv] * f;
            }
            gap = std::min(gap, -o.signed_distance(min_image(pt - o.center, ell)));
          }
        }
      }
      if (gap < 8.0 * eps)
        throw LiftingError("droplets " + std::to_string(i) + " and " + std::to_string(j) +
                           " are closer than 8 eps");
    }

  PhaseField f;
  f.params = config.params;
  f.epsilon = eps;
  f.n = grid_n;
  f.u.assign(static_cast<std::size_t>(grid_n) * grid_n, -1.0);
  const double reach = 12.0 * eps;  // tanh(-9) = -1 + 3e-8; beyond this use the core value
  std::vector<double> dist(f.u.size(), -std::numeric_limits<double>::infinity());
  for (const Droplet& d : config.droplets) {
    const double rb = d.bounding_radius() + 4.0 * reach;
    const int i0 = static_cast<int>(std::floor((d.center.x - rb) / h - 0.5));
    const int i1 = static_cast<int>(std::ceil((d.center.x + rb) / h - 0.5));
    const int j0 = static_cast<int>(std::floor((d.center.y - rb) / h - 0.5));
    const int j1 = static_cast<int>(std::ceil((d.center.y + rb) / h - 0.5));
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) {
        const Vec2 x{(i + 0.5) * h, (j + 0.5) * h};
        const double sd = d.signed_distance(x - d.center);
        const int ii = ((i % grid_n) + grid_n) % grid_n;
        const int jj = ((j % grid_n) + grid_n) % grid_n;
        double& slot = dist[static_cast<std::size_t>(ii) * grid_n + jj];
        slot = std::max(slot, sd);
      }
  }
  for (std::size_t k = 0; k < f.u.size(); ++k)
    if (std::isfinite(dist[k])) f.u[k] = std::tanh(0.75 * dist[k] / eps);
  // Points never visited sit further than 4 * reach outside every droplet; tanh there is -1 to double precision.

  const double ubar = field_background(f);
  const double mean_u = f.mean();
  const double mean_w = accurate_sum(f.u, [](double v) { return 0.5 * (1.0 - v); }) / static_cast<double>(f.u.size());
  const double s = (ubar - mean_u) / mean_w;
  if (s < 0.0)
    throw LiftingError("droplet phase exceeds the mass budget: background shift would be negative");
  if (s > 2.0) throw LiftingError("background shift exceeds the admissible range");
  for (double& v : f.u) v += s * 0.5 * (1.0 - v);
  // Remove the last rounding residue of the mean on the majority phase.
  for (int pass = 0; pass < 2; ++pass) {
    const double resid = ubar - f.mean();
    if (resid == 0.0) break;
    const double wsum = accurate_sum(f.u, [](double v) { return 0.5 * (1.0 - v); });
    const double a = resid * static_cast<double>(f.u.size()) / wsum;
    for (double& v : f.u) v += a * 0.5 * (1.0 - v);
  }
  f.mass_constrained = true;
  return f;
}

Truncation truncate_field(const PhaseField& field) {
  const Scaling s(field.epsilon);
  Truncation t;
  t.binary.resize(field.u.size());
  std::vector<double> dens(field.u.size());
  for (std::size_t k = 0; k < field.u.size(); ++k) {
    t.binary[k] = field.u[k] > 0.0 ? 1 : 0;
    dens[k] = t.binary[k] ? s.density : 0.0;
  }
  t.mu0 = DensityMeasure::from_grid(field.params.ell, field.n, std::move(dens));
  return t;
}

double interface_volume(const PhaseField& field, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  const double h = field.cell_size();
  std::size_t count = 0;
  for (double v : field.u)
    if (v >= -1.0 + delta && v <= 1.0 - delta) ++count;
  return static_cast<double>(count) * h * h;
}

PhaseField relax_field(const PhaseField& field, int steps, double dt, std::vector<double>* energies) {
  if (!field.mass_constrained) throw ConstraintError("relaxation needs a mass-constrained field");
  if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
  const int n = field.n;
  const double ell = field.params.ell;
  const double dk = 2.0 * kPi / ell;
  const double eps2 = field.epsilon * field.epsilon;
  const double mean0 = field.mean();
  PhaseField cur = field;
  double e_prev = diffuse_energy(cur).total;
  if (energies) energies->push_back(e_prev);
  Fft2 plan(n);
  const double inv = 1.0 / (static_cast<double>(n) * n);
  std::vector<cplx> uh(cur.u.size());
  std::vector<cplx> wh(cur.u.size());
  for (int step = 0; step < steps; ++step) {
    for (std::size_t k = 0; k < cur.u.size(); ++k) {
      uh[k] = cur.u[k];
      wh[k] = double_well_derivative(cur.u[k]);
    }
    plan.forward(uh);
    plan.forward(wh);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * n + j;
        const double kk = k_squared(i, j, n, dk);
        if (kk == 0.0) continue;  // mean preserved
        const double lhs = 1.0 + dt * (kStabilizer + eps2 * kk + 1.0 / kk);
        uh[idx] = ((1.0 + dt * kStabilizer) * uh[idx] - dt * wh[idx]) / lhs;
      }
    plan.backward(uh);
    PhaseField next = cur;
    for (std::size_t k = 0; k < next.u.size(); ++k) next.u[k] = uh[k].real() * inv;
    const double drift = mean0 - next.mean();
    for (double& v : next.u) v += drift;
    const double e = diffuse_energy(next).total;
    if (e > e_prev + 1e-12 * std::abs(e_prev))
      throw StepSizeError("diffuse energy increased at dt = " + fmt17(dt), 0.5 * dt);
    cur = std::move(next);
    e_prev = e;
    if (energies) energies->push_back(e);
  }
  return cur;
}

ComparisonReport compare_energies(const DropletConfig& config, const GreenEvaluator& g, int grid_n,
                                  int relax_steps, double dt) {
  ComparisonReport r;
  r.epsilon = config.epsilon;
  r.grid = grid_n;
  r.kappa_matches_well = std::abs(config.params.kappa - 2.0 / 3.0) < 1e-9;
  r.sharp_energy = sharp_energy(config, g).total_physical;
  const PhaseField lifted = lift_config(config, grid_n);
  r.diffuse_energy = diffuse_energy(lifted).total;
  r.ratio = r.diffuse_energy / r.sharp_energy;
  if (relax_steps > 0) {
    const PhaseField relaxed = relax_field(lifted, relax_steps, dt);
    r.diffuse_relaxed = diffuse_energy(relaxed).total;
  } else {
    r.diffuse_relaxed = r.diffuse_energy;
  }
  r.ratio_relaxed = r.diffuse_relaxed / r.sharp_energy;
  return r;
}

void save_phase_field(const std::string& path, const PhaseField& field) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << "okdrop-phase-field " << field.n << ' ' << fmt17(field.params.ell) << ' ' << fmt17(field.params.kappa)
    << ' ' << fmt17(field.params.delta_bar) << ' ' << fmt17(field.epsilon) << ' '
    << (field.mass_constrained ? 1 : 0) << '\n';
  f.write(reinterpret_cast<const char*>(field.u.data()),
          static_cast<std::streamsize>(field.u.size() * sizeof(double)));
  if (!f) throw IoError("write failed for " + path);
}

PhaseField load_phase_field(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::string header;
  std::getline(f, header);
  std::istringstream hs(header);
  std::string tag;
  PhaseField p;
  int flag = 0;
  if (!(hs >> tag >> p.n >> p.params.ell >> p.params.kappa >> p.params.delta_bar >> p.epsilon >> flag) ||
      tag != "okdrop-phase-field" || p.n < 1)
    throw IoError("bad phase-field header in " + path);
  p.mass_constrained = flag != 0;
  p.u.resize(static_cast<std::size_t>(p.n) * p.n);
  f.read(reinterpret_cast<char*>(p.u.data()), static_cast<std::streamsize>(p.u.size() * sizeof(double)));
  if (!f) throw IoError("truncated phase-field data in " + path);
  return p;
}

}  // namespace okdrop
