#include "okdrop/sharp_energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "okdrop/error.hpp"
#include "okdrop/format.hpp"
#include "okdrop/parallel.hpp"
#include "okdrop/special.hpp"

namespace okdrop {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string EnergyBreakdown::to_json() const {
  std::ostringstream o;
  o << "{\"background\": " << fmt17(background) << ", \"perimeter_term\": " << fmt17(perimeter_term)
    << ", \"area_term\": " << fmt17(area_term) << ", \"self_interaction\": " << fmt17(self_interaction)
    << ", \"pair_interaction\": " << fmt17(pair_interaction)
    << ", \"total_rescaled\": " << fmt17(total_rescaled)
    << ", \"total_physical\": " << fmt17(total_physical) << "}";
  return o.str();
}

double background_density(double epsilon, const TorusParams& params) {
  params.validate();
  const Scaling s(epsilon);
  return -1.0 + params.delta_bar / s.density;
}

QuadRule droplet_quadrature(const Droplet& d, int order) {
  if (order < 1) throw ParameterError("quadrature order must be >= 1");
  QuadRule q;
  const GaussRule& gl = gauss_legendre(order);
  if (d.is_disk()) {
    const int na = 2 * order;
    for (int i = 0; i < order; ++i) {
      const double r = 0.5 * d.radius * (gl.nodes[i] + 1.0);
      const double wr = 0.5 * d.radius * gl.weights[i] * r;
      for (int k = 0; k < na; ++k) {
        const double th = 2.0 * kPi * (k + 0.5) / na;
        q.x.push_back(d.center + Vec2{r * std::cos(th), r * std::sin(th)});
        q.w.push_back(wr * 2.0 * kPi / na);
      }
    }
    return q;
  }
  for (const Triangle& t : triangulate(d.vertices)) {
    const Vec2 e1 = t[1] - t[0];
    const Vec2 e2 = t[2] - t[1];
    const double jac = std::abs(cross(e1, e2));
    for (int i = 0; i < order; ++i) {
      const double u = 0.5 * (gl.nodes[i] + 1.0);
      for (int j = 0; j < order; ++j) {
        const double v = 0.5 * (gl.nodes[j] + 1.0);
        q.x.push_back(d.center + t[0] + (e1 + e2 * v) * u);
        q.w.push_back(0.25 * gl.weights[i] * gl.weights[j] * u * jac);
      }
    }
  }
  return q;
}

double disk_charge(double kappa, double a) { return 2.0 * kPi * a * bessel_i1(kappa * a) / kappa; }

double disk_charge_derivative(double kappa, double a) { return 2.0 * kPi * a * bessel_i0(kappa * a); }

double disk_free_self(double kappa, double a) {
  // (pi a^2 / kappa^2)(1 - 2 I1 K1) rewritten without cancellation.
  const double z = kappa * a;
  return kPi * a * a / (kappa * kappa) * z * (bessel_k1(z) * bessel_i2(z) + bessel_i1(z) * bessel_k0(z));
}

double disk_free_self_derivative(double kappa, double a) {
  const double z = kappa * a;
  return 4.0 * kPi * a * a * bessel_i1(z) * bessel_k0(z) / kappa;
}

double image_constant(const GreenEvaluator& g) {
  const double kappa = g.params().kappa;
  return g.remainder_at_origin() + (std::log(0.5 * kappa) + std::numbers::egamma) / (2.0 * kPi);
}

double disk_log_self_integral(double a) {
  return kPi * kPi * a * a * a * a * (std::log(a) - 0.25);
}

double polygon_log_potential(const Polygon& poly, const Vec2& x) {
  // ln r = Laplacian of (r^2/4)(ln r - 1); the flux through each edge reduces
  // to a one-dimensional integral along the edge.
  double total = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i] - x;
    const Vec2 b = poly[(i + 1) % n] - x;
    const Vec2 e = b - a;
    const double len = e.norm();
    if (len == 0.0) continue;
    const Vec2 t = e / len;
    const Vec2 nrm{t.y, -t.x};
    const double h = dot(a, nrm);
    if (h == 0.0) continue;
    const double s1 = dot(a, t);
    const double s2 = dot(b, t);
    auto prim = [h](double s) {
      const double r2 = h * h + s * s;
      return (s == 0.0 ? 0.0 : s * std::log(r2)) - 2.0 * s + 2.0 * h * std::atan(s / h);
    };
    total += 0.25 * h * (prim(s2) - prim(s1) - len);
  }
  return total;
}

namespace {

// Polygons with many vertices get a lower per-triangle order so the node
// count stays near that of an 8-triangle polygon at the requested order.
QuadRule budget_quadrature(const Droplet& d, int order) {
  if (d.is_disk()) return droplet_quadrature(d, order);
  const double tri = static_cast<double>(d.vertices.size() - 2);
  const int eff = std::clamp(static_cast<int>(std::sqrt(8.0 * order * order / tri)), std::min(3, order), order);
  return droplet_quadrature(d, eff);
}

}  // namespace

double pair_integral(const Droplet& a, const Droplet& b, const GreenEvaluator& g, int quad_order) {
  const double kappa = g.params().kappa;
  if (a.is_disk() && b.is_disk())
    return disk_charge(kappa, a.radius) * disk_charge(kappa, b.radius) * g.value(a.center - b.center);
  if (a.is_disk() || b.is_disk()) {
    const Droplet& disk = a.is_disk() ? a : b;
    const Droplet& poly = a.is_disk() ? b : a;
    const QuadRule q = budget_quadrature(poly, quad_order);
    double s = 0.0;
    for (std::size_t k = 0; k < q.x.size(); ++k) s += q.w[k] * g.value(q.x[k] - disk.center);
    return disk_charge(kappa, disk.radius) * s;
  }
  const QuadRule qa = budget_quadrature(a, quad_order);
  const QuadRule qb = budget_quadrature(b, quad_order);
  double s = 0.0;
  for (std::size_t i = 0; i < qa.x.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < qb.x.size(); ++j) row += qb.w[j] * g.value(qa.x[i] - qb.x[j]);
    s += qa.w[i] * row;
  }
  return s;
}

double self_integral(const Droplet& d, const GreenEvaluator& g, int quad_order) {
  const double kappa = g.params().kappa;
  if (d.is_disk()) {
    const double q = disk_charge(kappa, d.radius);
    return disk_free_self(kappa, d.radius) + q * q * image_constant(g);
  }
  const Polygon& poly = d.vertices;
  const Droplet local = Droplet::polygon({0.0, 0.0}, poly);
  const QuadRule outer = budget_quadrature(local, quad_order + 4);
  double log_part = 0.0;
  for (std::size_t k = 0; k < outer.x.size(); ++k) log_part += outer.w[k] * polygon_log_potential(poly, outer.x[k]);
  const QuadRule q = budget_quadrature(local, quad_order);
  const double r0 = g.remainder_at_origin();
  double reg = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    double row = 0.5 * q.w[i] * r0;
    for (std::size_t j = i + 1; j < q.x.size(); ++j) row += q.w[j] * g.remainder(q.x[i] - q.x[j]);
    reg += 2.0 * q.w[i] * row;
  }
  return -log_part / (2.0 * kPi) + reg;
}

std::vector<double> interaction_matrix(const DropletConfig& config, const GreenEvaluator& g, int quad_order) {
  if (quad_order < 4) throw ParameterError("quad_order must be >= 4");
  config.validate();
  const std::size_t n = config.droplets.size();
  const Scaling s = config.scaling();
  const double c2 = 2.0 * s.density * s.density;
  std::vector<double> m(n * n, 0.0);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      m[i * n + i] = c2 * self_integral(config.droplets[i], g, quad_order);
      for (std::size_t j = i + 1; j < n; ++j)
        m[i * n + j] = c2 * pair_integral(config.droplets[i], config.droplets[j], g, quad_order);
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m[j * n + i] = m[i * n + j];
  return m;
}

EnergyBreakdown sharp_energy(const DropletConfig& config, const GreenEvaluator& g, int quad_order) {
  const RescaledStats st = rescaled_stats(config);
  const std::vector<double> m = interaction_matrix(config, g, quad_order);
  const Scaling s = config.scaling();
  const TorusParams& p = config.params;
  EnergyBreakdown e;
  e.background = p.background_energy();
  double sp = 0.0;
  double sa = 0.0;
  for (std::size_t i = 0; i < st.areas.size(); ++i) {
    sp += st.perimeters[i];
    sa += st.areas[i];
  }
  e.perimeter_term = sp / s.abs_log;
  e.area_term = -2.0 * p.delta_bar / (p.kappa * p.kappa) * sa / s.abs_log;
  const std::size_t n = st.areas.size();
  for (std::size_t i = 0; i < n; ++i) {
    e.self_interaction += m[i * n + i];
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) e.pair_interaction += m[i * n + j];
  }
  e.total_rescaled = e.perimeter_term + e.area_term + e.self_interaction + e.pair_interaction;
  e.total_physical = s.energy * (e.background + e.total_rescaled);
  return e;
}

DiskEnergyGradient disk_energy_gradient(const DropletConfig& config, const GreenEvaluator& g) {
  const std::size_t n = config.droplets.size();
  for (const auto& d : config.droplets)
    if (!d.is_disk()) throw ParameterError("closed-form gradient needs an all-disk configuration");
  const Scaling s = config.scaling();
  const TorusParams& p = config.params;
  const double kappa = p.kappa;
  const double c2 = 2.0 * s.density * s.density;
  const double greg = image_constant(g);
  const double area_coef = -2.0 * p.delta_bar / (kappa * kappa) / s.abs_log;

  DiskEnergyGradient out;
  out.centers.assign(n, Vec2{});
  out.radii.assign(n, 0.0);
  std::vector<double> q(n);
  std::vector<double> dq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = config.droplets[i].radius;
    q[i] = disk_charge(kappa, a);
    dq[i] = disk_charge_derivative(kappa, a);
    out.energy += s.length * 2.0 * kPi * a / s.abs_log + area_coef * s.area * kPi * a * a;
    out.energy += c2 * (disk_free_self(kappa, a) + q[i] * q[i] * greg);
    out.radii[i] += s.length * 2.0 * kPi / s.abs_log + area_coef * s.area * 2.0 * kPi * a;
    out.radii[i] += c2 * (disk_free_self_derivative(kappa, a) + 2.0 * q[i] * dq[i] * greg);
  }
  // Pair terms; per-row partials keep the reduction order fixed.
  std::vector<double> row_energy(n, 0.0);
  std::vector<Vec2> row_grad(n);
  std::vector<double> row_rad(n, 0.0);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const GreenValue gv = g.at(config.droplets[i].center - config.droplets[j].center);
        row_energy[i] += c2 * q[i] * q[j] * gv.value;
        row_grad[i] += gv.gradient * (2.0 * c2 * q[i] * q[j]);
        row_rad[i] += 2.0 * c2 * dq[i] * q[j] * gv.value;
      }
  });
  for (std::size_t i = 0; i < n; ++i) {
    out.energy += row_energy[i];
    out.centers[i] += row_grad[i];
    out.radii[i] += row_rad[i];
  }
  return out;
}

}  // namespace okdrop
