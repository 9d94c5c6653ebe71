#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "okdrop/error.hpp"
#include "okdrop/sharp_energy.hpp"
#include "support/oracles.hpp"

using namespace okdrop;

namespace {

const TorusParams kUnit{1.0, 2.0 / 3.0, 1.0};
const GreenEvaluator& unit_green() {
  static const GreenEvaluator g = build_green(kUnit);
  return g;
}

Polygon circle_polygon(double r, int n) {
  Polygon p;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    p.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return p;
}

DropletConfig random_disks(std::mt19937_64& rng, int count, double eps, const TorusParams& p) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Scaling s(eps);
  DropletConfig c;
  c.params = p;
  c.epsilon = eps;
  while (static_cast<int>(c.droplets.size()) < count) {
    const Droplet d = Droplet::disk({p.ell * u(rng), p.ell * u(rng)}, s.optimal_radius() * (0.6 + 0.8 * u(rng)));
    bool ok = true;
    for (const auto& o : c.droplets) ok = ok && !droplets_overlap(d, o, p.ell);
    if (ok) c.droplets.push_back(d);
  }
  return c;
}

}  // namespace

TEST_CASE("background density") {
  const double e10 = std::exp(-10.0);
  CHECK(background_density(e10, kUnit) == doctest::Approx(-1.0 + std::exp(-20.0 / 3.0) * std::cbrt(10.0)).epsilon(1e-15));
  double prev = background_density(1e-4, kUnit);
  for (double eps : {1e-6, 1e-8}) {
    const double v = background_density(eps, kUnit);
    CHECK(v < prev);
    CHECK(v > -1.0);
    prev = v;
  }
  TorusParams twice = kUnit;
  twice.delta_bar = 2.0;
  CHECK(background_density(1e-5, twice) + 1.0 == doctest::Approx(2.0 * (background_density(1e-5, kUnit) + 1.0)));
  CHECK_THROWS_AS(background_density(0.5, kUnit), ParameterError);
  CHECK_THROWS_AS(background_density(0.0, kUnit), ParameterError);
}

TEST_CASE("disk log integral against Monte-Carlo") {
  const double a = 0.3;
  const double mc = oracle::monte_carlo_disk_log(a, 10000000, 17);
  CHECK(std::abs(disk_log_self_integral(a) - mc) / std::abs(mc) < 1e-3);
}

TEST_CASE("polygon log potential against quadrature of ln") {
  const Polygon tri{{-0.03, -0.02}, {0.05, -0.01}, {0.0, 0.04}};
  for (const Vec2 x : {Vec2{0.2, 0.1}, Vec2{0.01, 0.005}, Vec2{-0.1, 0.3}}) {
    // brute-force midpoint sum on a fine grid of the bounding box
    const int n = 1200;
    const double x0 = -0.03, x1 = 0.05, y0 = -0.02, y1 = 0.04;
    const double hx = (x1 - x0) / n, hy = (y1 - y0) / n;
    std::vector<std::pair<double, double>> tp;
    for (auto v : tri) tp.emplace_back(v.x, v.y);
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double px = x0 + (i + 0.5) * hx, py = y0 + (j + 0.5) * hy;
        if (oracle::inside(tp, px, py)) s += std::log(std::hypot(px - x.x, py - x.y)) * hx * hy;
      }
    CHECK(std::abs(polygon_log_potential(tri, x) - s) < 2e-3 * std::abs(s) + 1e-8);
  }
}

TEST_CASE("Newton charge of a disk") {
  const GreenEvaluator& g = unit_green();
  const Droplet d = Droplet::disk({0.4, 0.4}, 0.06);
  const QuadRule q = droplet_quadrature(d, 24);
  for (const Vec2 x : {Vec2{0.55, 0.4}, Vec2{0.9, 0.1}, Vec2{0.4, 0.47}}) {
    double s = 0.0;
    for (std::size_t k = 0; k < q.x.size(); ++k) s += q.w[k] * g.value(x - q.x[k]);
    CHECK(disk_charge(kUnit.kappa, 0.06) * g.value(x - d.center) == doctest::Approx(s).epsilon(1e-9));
  }
  const double h = 1e-6;
  CHECK(disk_charge_derivative(2.0, 0.1) ==
        doctest::Approx((disk_charge(2.0, 0.1 + h) - disk_charge(2.0, 0.1 - h)) / (2 * h)).epsilon(1e-7));
  CHECK(disk_free_self_derivative(2.0, 0.1) ==
        doctest::Approx((disk_free_self(2.0, 0.1 + h) - disk_free_self(2.0, 0.1 - h)) / (2 * h)).epsilon(1e-7));
  // small-disk limit of the free self integral: -(1/2pi) [log integral + (ln(kappa/2) + gamma) (pi a^2)^2]
  const double a = 1e-3, k = 2.0;
  const double approx = -(disk_log_self_integral(a) +
                          (std::log(k / 2) + std::numbers::egamma) * std::pow(std::numbers::pi * a * a, 2)) /
                        (2 * std::numbers::pi);
  CHECK(disk_free_self(k, a) == doctest::Approx(approx).epsilon(1e-5));
}

TEST_CASE("polygon paths agree with disk closed forms") {
  const GreenEvaluator& g = unit_green();
  const double r = 0.04;
  const Droplet disk = Droplet::disk({0.3, 0.3}, r);
  // polygon inscribed circle with the disk's area
  const int n = 400;
  const double rp = r * std::sqrt(2 * std::numbers::pi / (n * std::sin(2 * std::numbers::pi / n)));
  const Droplet poly = Droplet::polygon({0.3, 0.3}, circle_polygon(rp, n));
  CHECK(poly.area() == doctest::Approx(disk.area()).epsilon(1e-12));
  CHECK(self_integral(poly, g, 8) == doctest::Approx(self_integral(disk, g, 8)).epsilon(1e-4));
  const Droplet other = Droplet::disk({0.7, 0.55}, 0.03);
  CHECK(pair_integral(poly, other, g, 8) == doctest::Approx(pair_integral(disk, other, g, 8)).epsilon(1e-6));
  const Droplet poly2 = Droplet::polygon({0.7, 0.55}, circle_polygon(0.03, 64));
  const Droplet disk2 = Droplet::disk({0.7, 0.55}, std::sqrt(poly2.area() / std::numbers::pi));
  CHECK(pair_integral(poly, poly2, g, 8) == doctest::Approx(pair_integral(disk, disk2, g, 8)).epsilon(1e-6));
}

TEST_CASE("far pair entry matches point masses") {
  const double eps = 1e-6;
  const Scaling s(eps);
  DropletConfig c;
  c.params = kUnit;
  c.epsilon = eps;
  const double r = s.optimal_radius();
  c.droplets = {Droplet::disk({0.2, 0.2}, r), Droplet::disk({0.2 + 12 * r, 0.25}, r)};
  const auto m = interaction_matrix(c, unit_green());
  const double point = 2.0 * kOptimalArea * kOptimalArea / (s.abs_log * s.abs_log) *
                       unit_green().value(c.droplets[0].center - c.droplets[1].center);
  CHECK(std::abs(m[1] / point - 1.0) < 0.01);
}

TEST_CASE("disk self entry leading order") {
  // kappa = 2, ell = 1 keeps the image constant small; see the ledger
  const TorusParams p{1.0, 2.0, 1.0};
  const GreenEvaluator g = build_green(p);
  const double eps = 1e-6;
  const Scaling s(eps);
  DropletConfig c;
  c.params = p;
  c.epsilon = eps;
  c.droplets = {Droplet::disk({0.5, 0.5}, s.optimal_radius())};
  const auto m = interaction_matrix(c, g);
  const double lead = kOptimalArea * kOptimalArea / (3 * std::numbers::pi * s.abs_log);
  CHECK(std::abs(m[0] / lead - 1.0) < 0.35);
}

TEST_CASE("energy breakdown identities") {
  const GreenEvaluator& g = unit_green();
  DropletConfig empty;
  empty.params = kUnit;
  empty.epsilon = 1e-5;
  const EnergyBreakdown e0 = sharp_energy(empty, g);
  CHECK(e0.total_rescaled == 0.0);
  CHECK(e0.total_physical == doctest::Approx(Scaling(1e-5).energy * kUnit.background_energy()).epsilon(1e-15));

  const double eps = 1e-8;
  const Scaling s(eps);
  DropletConfig one = empty;
  one.epsilon = eps;
  one.droplets = {Droplet::disk({0.5, 0.5}, s.optimal_radius())};
  const EnergyBreakdown e1 = sharp_energy(one, g);
  CHECK(e1.perimeter_term == doctest::Approx(2 * kCbrt3 * std::numbers::pi / s.abs_log).epsilon(1e-13));
  CHECK(e1.area_term ==
        doctest::Approx(-2 * kUnit.delta_bar * kOptimalArea / (kUnit.kappa * kUnit.kappa * s.abs_log)).epsilon(1e-13));
  CHECK(e1.total_rescaled ==
        e1.perimeter_term + e1.area_term + e1.self_interaction + e1.pair_interaction);
  CHECK(e1.total_physical == doctest::Approx(s.energy * (e1.background + e1.total_rescaled)).epsilon(1e-15));

  const auto j = nlohmann::json::parse(e1.to_json());
  CHECK(j.at("total_rescaled").get<double>() == e1.total_rescaled);
  CHECK(j.at("pair_interaction").get<double>() == 0.0);

  TorusParams big = kUnit;
  big.ell = 2.0;
  DropletConfig two = one;
  two.params = big;
  const EnergyBreakdown e2 = sharp_energy(two, build_green(big));
  CHECK(e2.background == doctest::Approx(4 * e1.background).epsilon(1e-15));
  CHECK(e2.perimeter_term == e1.perimeter_term);
  CHECK(e2.area_term == e1.area_term);
}

TEST_CASE("matrix symmetry, positivity and translation invariance") {
  const GreenEvaluator& g = unit_green();
  std::mt19937_64 rng(31);
  DropletConfig c = random_disks(rng, 6, 1e-4, kUnit);
  c.droplets.push_back(Droplet::polygon({0.91, 0.93}, {{-0.01, -0.01}, {0.015, -0.008}, {0.0, 0.012}}));
  try {
    c.validate();
  } catch (const GeometryError&) {
    c.droplets.pop_back();
  }
  const auto m = interaction_matrix(c, g);
  const std::size_t n = c.droplets.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(m[i * n + j] == m[j * n + i]);
      CHECK(m[i * n + j] > 0.0);
    }
  const double e = sharp_energy(c, g).total_rescaled;
  DropletConfig shifted = c;
  for (auto& d : shifted.droplets) d.center = wrap_point(d.center + Vec2{0.3721, -0.1414}, 1.0);
  CHECK(std::abs(sharp_energy(shifted, g).total_rescaled - e) < 1e-8);
  CHECK_THROWS_AS(interaction_matrix(c, g, 3), ParameterError);
}

TEST_CASE("lower bound by the minimum of G") {
  const GreenEvaluator& g = unit_green();
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    DropletConfig c = random_disks(rng, 1 + t % 8, 1e-5, kUnit);
    const EnergyBreakdown e = sharp_energy(c, g);
    const RescaledStats st = rescaled_stats(c);
    const Scaling s(c.epsilon);
    double mass = 0.0;
    for (double a : st.areas) mass += a / s.abs_log;
    CHECK(e.total_rescaled >= e.perimeter_term + e.area_term + 2 * g.min_value() * mass * mass - 1e-12);
  }
}

TEST_CASE("adding a far droplet raises the interaction") {
  const GreenEvaluator& g = unit_green();
  DropletConfig c;
  c.params = kUnit;
  c.epsilon = 1e-6;
  const double r = Scaling(1e-6).optimal_radius();
  c.droplets = {Droplet::disk({0.1, 0.1}, r), Droplet::disk({0.2, 0.15}, r)};
  const EnergyBreakdown a = sharp_energy(c, g);
  c.droplets.push_back(Droplet::disk({0.6, 0.6}, r));
  const EnergyBreakdown b = sharp_energy(c, g);
  CHECK(b.self_interaction + b.pair_interaction > a.self_interaction + a.pair_interaction);
}

TEST_CASE("closed-form disk energy and gradient") {
  const GreenEvaluator& g = unit_green();
  std::mt19937_64 rng(12);
  DropletConfig c = random_disks(rng, 5, 1e-6, kUnit);
  const DiskEnergyGradient dg = disk_energy_gradient(c, g);
  CHECK(dg.energy == doctest::Approx(sharp_energy(c, g).total_rescaled).epsilon(1e-12));
  const double h = 1e-6 * std::min(1.0, c.droplets[0].radius * 100);
  for (std::size_t i = 0; i < c.droplets.size(); ++i) {
    DropletConfig p = c, m = c;
    p.droplets[i].radius += h;
    m.droplets[i].radius -= h;
    const double fd = (disk_energy_gradient(p, g).energy - disk_energy_gradient(m, g).energy) / (2 * h);
    CHECK(dg.radii[i] == doctest::Approx(fd).epsilon(1e-5));
  }
  DropletConfig poly = c;
  poly.droplets.push_back(Droplet::polygon({0.5, 0.95}, {{0, 0}, {0.01, 0}, {0, 0.01}}));
  CHECK_THROWS_AS(disk_energy_gradient(poly, g), ParameterError);
}
