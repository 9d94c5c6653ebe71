#include "okdrop/limit_energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "okdrop/error.hpp"
#include "okdrop/fft.hpp"

namespace okdrop {

namespace {

constexpr double kPi = std::numbers::pi;

struct Spectrum {
  int n = 0;
  double dk = 0.0;
  std::vector<cplx> mu_hat;  // h^2 * DFT, i.e. the Fourier integral of mu
  bool smeared = false;
};

Spectrum density_spectrum(const DensityMeasure& mu0, const TorusParams& params) {
  params.validate();
  if (std::abs(mu0.ell - params.ell) > 1e-12 * params.ell)
    throw ParameterError("density grid and torus disagree on ell");
  const DensityMeasure mu = mu0.atoms.empty() ? mu0 : mu0.smeared();
  Spectrum s;
  s.n = mu.n;
  s.dk = 2.0 * kPi / params.ell;
  s.smeared = !mu0.atoms.empty();
  s.mu_hat = fft2_real(mu.grid, mu.n);
  const double h2 = mu.cell_area();
  for (auto& z : s.mu_hat) z *= h2;
  return s;
}

double symbol(const TorusParams& p, double dk, int i, int j, int n) {
  const double k1 = dk * fft_freq(i, n);
  const double k2 = dk * fft_freq(j, n);
  return p.kappa * p.kappa + k1 * k1 + k2 * k2;
}

}  // namespace

double PotentialField::integral() const {
  double s = 0.0;
  for (double v : grid) s += v;
  return s * cell_area();
}

PotentialField solve_potential(const DensityMeasure& mu, const TorusParams& params) {
  Spectrum s = density_spectrum(mu, params);
  const int n = s.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.mu_hat[static_cast<std::size_t>(i) * n + j] /= symbol(params, s.dk, i, j, n);
  PotentialField v;
  v.params = params;
  v.n = n;
  v.atoms_smeared = s.smeared;
  // v_hat holds Fourier integrals; the grid values are (1/ell^2) sum v_hat e^{ikx}.
  const double h2 = (params.ell / n) * (params.ell / n);
  v.grid = ifft2_real(std::move(s.mu_hat), n);
  for (double& x : v.grid) x /= h2;
  return v;
}

CoulombRoutes coulomb_routes(const DensityMeasure& mu, const TorusParams& params) {
  Spectrum s = density_spectrum(mu, params);
  const int n = s.n;
  const double ell2 = params.ell * params.ell;
  const double k2 = params.kappa * params.kappa;
  CoulombRoutes out;
  std::vector<cplx> v(s.mu_hat.size());
  std::vector<cplx> vx(v.size());
  std::vector<cplx> vy(v.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      const double sy = symbol(params, s.dk, i, j, n);
      out.spectral += std::norm(s.mu_hat[idx]) / sy;
      const cplx vh = s.mu_hat[idx] / sy;
      v[idx] = vh;
      vx[idx] = cplx(0.0, s.dk * fft_freq(i, n)) * vh;
      vy[idx] = cplx(0.0, s.dk * fft_freq(j, n)) * vh;
    }
  out.spectral /= ell2;
  // Local route: back to the grid (complex fields keep the Nyquist modes exact).
  Fft2 plan(n);
  plan.backward(v);
  plan.backward(vx);
  plan.backward(vy);
  const double h2 = ell2 / (static_cast<double>(n) * n);
  double sum = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) sum += std::norm(vx[k]) + std::norm(vy[k]) + k2 * std::norm(v[k]);
  out.local = sum * h2 / (ell2 * ell2);
  return out;
}

double coulomb_energy(const DensityMeasure& mu, const TorusParams& params) {
  const CoulombRoutes r = coulomb_routes(mu, params);
  const double scale = std::max(std::abs(r.spectral), 1e-300);
  if (std::abs(r.spectral - r.local) > 1e-6 * scale)
    throw ConsistencyError("Coulomb energy routes disagree beyond 1e-6 relative");
  return r.spectral;
}

LimitEnergyParts limit_energy_parts(const DensityMeasure& mu, const TorusParams& params) {
  params.validate();
  for (double v : mu.grid)
    if (v < -1e-12) throw DomainError("limit energy needs a nonnegative density");
  for (const auto& a : mu.atoms)
    if (a.weight < -1e-12) throw DomainError("limit energy needs nonnegative atoms");
  const double bg = params.background_energy();
  const double k2 = params.kappa * params.kappa;
  LimitEnergyParts out;
  double mass = mu.grid_mass();
  for (const auto& a : mu.atoms) mass += a.weight;
  out.mass = mass;
  const CoulombRoutes r = coulomb_routes(mu, params);
  out.coulomb = r.spectral;
  out.nonlocal = bg + (kThreeTwoThirds - 2.0 * params.delta_bar / k2) * mass + 2.0 * r.spectral;
  const PotentialField v = solve_potential(mu, params);
  out.local = bg + (kThreeTwoThirds * k2 - 2.0 * params.delta_bar) * v.integral() + 2.0 * r.local;
  return out;
}

double limit_energy(const DensityMeasure& mu, const TorusParams& params) {
  const LimitEnergyParts p = limit_energy_parts(mu, params);
  const double scale = std::max({std::abs(p.nonlocal), params.background_energy(), 1e-300});
  if (std::abs(p.nonlocal - p.local) > 1e-8 * scale)
    throw ConsistencyError("local and nonlocal forms of the limit energy disagree");
  return p.nonlocal;
}

double limit_energy_constant(const TorusParams& params, double m) {
  params.validate();
  const double ell2 = params.ell * params.ell;
  const double k2 = params.kappa * params.kappa;
  return params.background_energy() + (kThreeTwoThirds - 2.0 * params.delta_bar / k2) * m * ell2 +
         2.0 * m * m * ell2 / k2;
}

OptimalDensity optimal_constant_density(const TorusParams& params) {
  params.validate();
  const double k2 = params.kappa * params.kappa;
  OptimalDensity o;
  o.delta_c = 0.5 * kThreeTwoThirds * k2;
  if (params.delta_bar <= o.delta_c) {
    o.mu_bar = 0.0;
    o.min_energy_density = params.delta_bar * params.delta_bar / (2.0 * k2);
  } else {
    o.mu_bar = 0.5 * (params.delta_bar - o.delta_c);
    o.min_energy_density = o.delta_c * (2.0 * params.delta_bar - o.delta_c) / (2.0 * k2);
  }
  return o;
}

ScalarMinimum golden_section_min(const std::function<long double(long double)>& f, double a, double b,
                                 double tol) {
  if (!(b > a)) throw ParameterError("golden-section bracket must satisfy a < b");
  const long double r = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double lo = a, hi = b;
  long double c = hi - r * (hi - lo);
  long double d = lo + r * (hi - lo);
  long double fc = f(c);
  long double fd = f(d);
  int evals = 2;
  while (hi - lo > tol * std::max(1.0L, std::abs(0.5L * (lo + hi)))) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - r * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + r * (hi - lo);
      fd = f(d);
    }
    ++evals;
  }
  ScalarMinimum m;
  m.argmin = static_cast<double>(0.5L * (lo + hi));
  m.value = static_cast<double>(f(0.5L * (lo + hi)));
  m.evaluations = evals + 1;
  return m;
}

ScalarMinimum minimize_constant_density(const TorusParams& params) {
  params.validate();
  const long double ell2 = static_cast<long double>(params.ell) * params.ell;
  const long double k2 = static_cast<long double>(params.kappa) * params.kappa;
  const long double db = params.delta_bar;
  const long double c23 = std::cbrt(9.0L);
  auto e0 = [&](long double m) {
    return db * db * ell2 / (2.0L * k2) + (c23 - 2.0L * db / k2) * m * ell2 + 2.0L * m * m * ell2 / k2;
  };
  return golden_section_min(e0, 0.0, params.delta_bar + 1.0);
}

ScalarMinimum minimize_profile() {
  const long double pi = std::numbers::pi_v<long double>;
  auto f = [&](long double x) { return 2.0L * std::sqrt(pi) / std::sqrt(x) + x / (3.0L * pi); };
  return golden_section_min(f, 0.1, 100.0);
}

ProfileValue droplet_profile_f(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("profile function needs x > 0");
  ProfileValue p;
  const double sp = std::sqrt(kPi);
  p.f = 2.0 * sp / std::sqrt(x) + x / (3.0 * kPi);
  p.f_second = 3.0 * sp / (2.0 * std::pow(x, 2.5));
  p.argmin = kOptimalArea;
  p.min_value = kThreeTwoThirds;
  return p;
}

}  // namespace okdrop
