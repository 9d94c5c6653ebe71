#include "okdrop/green.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "okdrop/error.hpp"
#include "okdrop/fft.hpp"
#include "okdrop/parallel.hpp"
#include "okdrop/special.hpp"

namespace okdrop {

namespace {

constexpr double kPi = std::numbers::pi;
// Heat-kernel terms with a/tau beyond this are below 1e-17 and dropped.
constexpr double kNearCutoff = 40.0;

// Sums over j >= 1 of c_j I_j and c_j I_{j-1}, where c_j = (-k2)^j / j! and
// I_j = int_0^tau t^{j-1} exp(-a/t) dt. I_0 = E1(a/tau) is passed in.
void near_series(double a, double tau, double k2, double i0, double& s_val, double& s_der) {
  const double ez = std::exp(-a / tau);
  double c = 1.0;
  double tj = 1.0;
  double iprev = i0;
  s_val = 0.0;
  s_der = 0.0;
  for (int j = 1; j < 200; ++j) {
    c *= -k2 / j;
    tj *= tau;
    const double ij = tj * ez / j - (a / j) * iprev;
    s_val += c * ij;
    s_der += c * iprev;
    iprev = ij;
    if (j >= 2 && std::abs(c) * tj / j <= 1e-18 * (std::abs(s_val) + 1e-300)) break;
  }
}

// Same expansion for the half-integer kernel of H: K_j = int_0^tau t^{j-3/2} exp(-a/t) dt.
double h_near_series(double a, double tau, double k2, double k0) {
  const double ez = std::exp(-a / tau);
  double c = 1.0;
  double sum = k0;
  double kprev = k0;
  for (int j = 1; j < 200; ++j) {
    c *= -k2 / j;
    const double p = j - 0.5;
    const double tp = std::pow(tau, p);
    const double kj = tp * ez / p - (a / p) * kprev;
    sum += c * kj;
    kprev = kj;
    if (j >= 2 && std::abs(c) * tp / p <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Near part of H at distance r > 0.
double h_near(double r, double tau, double k2) {
  const double a = 0.25 * r * r;
  if (a / tau > kNearCutoff) return 0.0;
  const double k0 = 2.0 * std::sqrt(kPi) / r * std::erfc(r / (2.0 * std::sqrt(tau)));
  return h_near_series(a, tau, k2, k0) / (4.0 * std::pow(kPi, 1.5));
}

// Regular value of the near part of H at the origin (1/(2 pi r) removed).
double h_near_regular_origin(double tau, double k2) {
  double sum = -2.0 / std::sqrt(tau);
  double c = 1.0;
  for (int j = 1; j < 200; ++j) {
    c *= -k2 / j;
    const double p = j - 0.5;
    const double add = c * std::pow(tau, p) / p;
    sum += add;
    if (j >= 2 && std::abs(add) <= 1e-18 * std::abs(sum)) break;
  }
  return sum / (4.0 * std::pow(kPi, 1.5));
}

std::array<double, 6> lagrange6(double t) {
  std::array<double, 6> w{};
  for (int k = 0; k < 6; ++k) {
    double num = 1.0;
    double den = 1.0;
    for (int m = 0; m < 6; ++m) {
      if (m == k) continue;
      num *= t - (m - 2);
      den *= k - m;
    }
    w[k] = num / den;
  }
  return w;
}

double choose_tau(double ell, int modes) {
  const double base = ell * ell / 1600.0;
  const double resolved = 37.0 * ell * ell / (kPi * kPi * modes * modes);
  return std::max(base, resolved);
}

}  // namespace

struct GreenEvaluator::Tables {
  int n = 0;
  std::vector<double> value;
  std::vector<double> gx;
  std::vector<double> gy;
};

GreenEvaluator::GreenEvaluator(const TorusParams& params, int mode_count, int table_size)
    : params_(params), mode_count_(mode_count), table_size_(table_size) {
  params_.validate();
  if (mode_count < 16 || mode_count % 2 != 0)
    throw ParameterError("mode_count must be even and >= 16");
  if (table_size < 64 || table_size % 2 != 0) throw ParameterError("table_size must be even and >= 64");

  const double ell = params_.ell;
  const double k2 = params_.kappa * params_.kappa;
  tau_ = choose_tau(ell, mode_count);
  near_radius2_ = 4.0 * kNearCutoff * tau_;
  image_range_ = static_cast<int>(std::ceil(std::sqrt(near_radius2_) / ell)) + 1;

  const int n = table_size;
  const int band = std::min(mode_count, table_size) / 2;
  std::vector<cplx> cv(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<cplx> cx(cv.size(), 0.0);
  std::vector<cplx> cy(cv.size(), 0.0);
  const double dk = 2.0 * kPi / ell;
  for (int i = 0; i < n; ++i) {
    const int m1 = fft_freq(i, n);
    if (std::abs(m1) >= band) continue;
    for (int j = 0; j < n; ++j) {
      const int m2 = fft_freq(j, n);
      if (std::abs(m2) >= band) continue;
      const double k1 = dk * m1;
      const double kk2 = dk * m2;
      const double s = k2 + k1 * k1 + kk2 * kk2;
      const double coef = std::exp(-tau_ * s) / s / (ell * ell);
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      cv[idx] = coef;
      cx[idx] = cplx(0.0, k1 * coef);
      cy[idx] = cplx(0.0, kk2 * coef);
    }
  }
  Fft2 plan(n);
  plan.backward(cv);
  plan.backward(cx);
  plan.backward(cy);
  auto tables = std::make_shared<Tables>();
  tables->n = n;
  tables->value.resize(cv.size());
  tables->gx.resize(cv.size());
  tables->gy.resize(cv.size());
  for (std::size_t k = 0; k < cv.size(); ++k) {
    tables->value[k] = cv[k].real();
    tables->gx[k] = cx[k].real();
    tables->gy[k] = cy[k].real();
  }
  tables_ = std::move(tables);

  double series = 0.0;
  double c = 1.0;
  double tj = 1.0;
  for (int j = 1; j < 200; ++j) {
    c *= -k2 / j;
    tj *= tau_;
    const double add = c * tj / j;
    series += add;
    if (j >= 2 && std::abs(add) <= 1e-18 * (std::abs(series) + 1e-300)) break;
  }
  r0_ = far_part({0.0, 0.0}).value + near_images({0.0, 0.0}, true).value +
        (-std::numbers::egamma + std::log(4.0 * tau_) + series) / (4.0 * kPi);

  double mn = std::numeric_limits<double>::infinity();
  const int ns = 128;
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j) {
      if (i == 0 && j == 0) continue;
      mn = std::min(mn, value({ell * i / ns, ell * j / ns}));
    }
  min_value_ = mn;
}

double GreenEvaluator::spectral_coefficient(int m1, int m2) const {
  const double dk = 2.0 * kPi / params_.ell;
  const double k1 = dk * m1;
  const double kk2 = dk * m2;
  return 1.0 / (params_.kappa * params_.kappa + k1 * k1 + kk2 * kk2);
}

GreenValue GreenEvaluator::far_part(const Vec2& x) const {
  const Tables& t = *tables_;
  const int n = t.n;
  const double h = params_.ell / n;
  const double px = wrap_positive(x.x, params_.ell) / h;
  const double py = wrap_positive(x.y, params_.ell) / h;
  const int ix = static_cast<int>(std::floor(px));
  const int iy = static_cast<int>(std::floor(py));
  const auto wx = lagrange6(px - ix);
  const auto wy = lagrange6(py - iy);
  GreenValue out;
  for (int a = 0; a < 6; ++a) {
    int ii = ix + a - 2;
    ii = ((ii % n) + n) % n;
    const std::size_t row = static_cast<std::size_t>(ii) * n;
    double sv = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    for (int b = 0; b < 6; ++b) {
      int jj = iy + b - 2;
      jj = ((jj % n) + n) % n;
      const std::size_t idx = row + jj;
      sv += wy[b] * t.value[idx];
      sx += wy[b] * t.gx[idx];
      sy += wy[b] * t.gy[idx];
    }
    out.value += wx[a] * sv;
    out.gradient.x += wx[a] * sx;
    out.gradient.y += wx[a] * sy;
  }
  return out;
}

GreenValue GreenEvaluator::near_images(const Vec2& x, bool skip_origin_image) const {
  const double ell = params_.ell;
  const double k2 = params_.kappa * params_.kappa;
  GreenValue out;
  for (int n1 = -image_range_; n1 <= image_range_; ++n1)
    for (int n2 = -image_range_; n2 <= image_range_; ++n2) {
      if (skip_origin_image && n1 == 0 && n2 == 0) continue;
      const Vec2 y{x.x + n1 * ell, x.y + n2 * ell};
      const double r2 = y.norm2();
      if (r2 >= near_radius2_ || r2 == 0.0) continue;
      const double a = 0.25 * r2;
      const double r = std::sqrt(r2);
      double s_val = 0.0;
      double s_der = 0.0;
      const double e1 = exp_integral_e1(a / tau_);
      near_series(a, tau_, k2, e1, s_val, s_der);
      out.value += (e1 + s_val) / (4.0 * kPi);
      const double dr = -std::exp(-a / tau_) / (2.0 * kPi * r) - r * s_der / (8.0 * kPi);
      out.gradient += y * (dr / r);
    }
  return out;
}

double GreenEvaluator::remainder(const Vec2& x0) const {
  const Vec2 x = min_image(x0, params_.ell);
  const double r2 = x.norm2();
  if (r2 == 0.0) return r0_;
  const double k2 = params_.kappa * params_.kappa;
  const double a = 0.25 * r2;
  const double z = a / tau_;
  double own = 0.0;
  if (z < kNearCutoff) {
    double s_val = 0.0;
    double s_der = 0.0;
    near_series(a, tau_, k2, exp_integral_e1(z), s_val, s_der);
    own = (exp_integral_ein(z) - std::numbers::egamma + std::log(4.0 * tau_) + s_val) / (4.0 * kPi);
  } else {
    own = std::log(std::sqrt(r2)) / (2.0 * kPi);
  }
  return far_part(x).value + near_images(x, true).value + own;
}

Vec2 GreenEvaluator::remainder_gradient(const Vec2& x0) const {
  const Vec2 x = min_image(x0, params_.ell);
  const double r2 = x.norm2();
  if (r2 == 0.0) return {0.0, 0.0};
  const double k2 = params_.kappa * params_.kappa;
  const double a = 0.25 * r2;
  const double z = a / tau_;
  const double r = std::sqrt(r2);
  double dr = 0.0;
  if (z < kNearCutoff) {
    double s_val = 0.0;
    double s_der = 0.0;
    near_series(a, tau_, k2, exp_integral_e1(z), s_val, s_der);
    dr = -std::expm1(-z) / (2.0 * kPi * r) - r * s_der / (8.0 * kPi);
  } else {
    dr = 1.0 / (2.0 * kPi * r);
  }
  Vec2 grad = far_part(x).gradient + near_images(x, true).gradient;
  return grad + x * (dr / r);
}

GreenValue GreenEvaluator::spectral_branch(const Vec2& x0) const {
  const Vec2 x = min_image(x0, params_.ell);
  if (x.norm2() == 0.0) throw SingularityError("G is singular at the origin");
  GreenValue far = far_part(x);
  GreenValue near = near_images(x, false);
  return {far.value + near.value, far.gradient + near.gradient};
}

GreenValue GreenEvaluator::at(const Vec2& x0) const {
  const Vec2 x = min_image(x0, params_.ell);
  const double r2 = x.norm2();
  if (r2 == 0.0) throw SingularityError("G is singular at the origin");
  const double quarter = 0.25 * params_.ell;
  if (r2 > quarter * quarter) return spectral_branch(x);
  const double r = std::sqrt(r2);
  GreenValue out;
  out.value = -std::log(r) / (2.0 * kPi) + remainder(x);
  out.gradient = remainder_gradient(x) - x * (1.0 / (2.0 * kPi * r2));
  return out;
}

GreenEvaluator build_green(const TorusParams& params, int mode_count) {
  return GreenEvaluator(params, mode_count);
}

GreenValue green_at(const GreenEvaluator& g, const Vec2& x) { return g.at(x); }

double h_kernel_at(const TorusParams& params, const Vec2& x0, int image_cutoff) {
  params.validate();
  if (image_cutoff < 2) throw ParameterError("image_cutoff must be >= 2");
  const double ell = params.ell;
  const Vec2 x = min_image(x0, ell);
  if (x.norm2() == 0.0) throw SingularityError("H is singular at lattice points");
  // Sum shells from the outside in so small terms are accumulated first.
  double sum = 0.0;
  for (int c = image_cutoff; c >= 0; --c) {
    double shell = 0.0;
    for (int n1 = -c; n1 <= c; ++n1)
      for (int n2 = -c; n2 <= c; ++n2) {
        if (std::max(std::abs(n1), std::abs(n2)) != c) continue;
        const double r = std::hypot(x.x - n1 * ell, x.y - n2 * ell);
        shell += std::exp(-params.kappa * r) / r;
      }
    sum += shell;
  }
  return sum / (2.0 * kPi);
}

double h_kernel_tail_bound(const TorusParams& params, int image_cutoff) {
  // Shell c has 8c images, each at distance >= (c - 1/2) ell from x in the
  // fundamental cell; sum the geometric tail of shells beyond the cutoff.
  const double ell = params.ell;
  const double kl = params.kappa * ell;
  double bound = 0.0;
  for (int c = image_cutoff + 1; c < image_cutoff + 2000; ++c) {
    const double d = (c - 0.5) * ell;
    const double term = 8.0 * c * std::exp(-params.kappa * d) / (2.0 * kPi * d);
    bound += term;
    if (term < 1e-30 * bound || (kl * (c - image_cutoff) > 80.0)) break;
  }
  return bound;
}

int h_kernel_cutoff(const TorusParams& params, double tol) {
  params.validate();
  int c = 2;
  while (h_kernel_tail_bound(params, c) > tol && c < 100000) ++c;
  return c;
}

std::vector<double> sample_h_kernel(const TorusParams& params, int n) {
  params.validate();
  if (n < 8 || n % 2 != 0) throw ParameterError("grid size must be even");
  const double ell = params.ell;
  const double h = ell / n;
  const double k2 = params.kappa * params.kappa;
  const double tau = choose_tau(ell, n);

  std::vector<cplx> c(static_cast<std::size_t>(n) * n);
  const double dk = 2.0 * kPi / ell;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double k1 = dk * fft_freq(i, n);
      const double kk2 = dk * fft_freq(j, n);
      const double s = k2 + k1 * k1 + kk2 * kk2;
      c[static_cast<std::size_t>(i) * n + j] = std::erfc(std::sqrt(tau * s)) / std::sqrt(s) / (ell * ell);
    }
  Fft2 plan(n);
  plan.backward(c);
  std::vector<double> out(c.size());
  const double rc2 = 4.0 * kNearCutoff * tau;
  const int range = static_cast<int>(std::ceil(std::sqrt(rc2) / ell)) + 1;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (int j = 0; j < n; ++j) {
        const std::size_t idx = i * n + j;
        const Vec2 x = min_image({h * static_cast<double>(i), h * j}, ell);
        double v = c[idx].real();
        for (int n1 = -range; n1 <= range; ++n1)
          for (int n2 = -range; n2 <= range; ++n2) {
            const Vec2 y{x.x + n1 * ell, x.y + n2 * ell};
            const double r2 = y.norm2();
            if (r2 >= rc2 || r2 == 0.0) continue;
            v += h_near(std::sqrt(r2), tau, k2);
          }
        out[idx] = v;
      }
  });
  out[0] += h_near_regular_origin(tau, k2) +
            (kLatticeZetaMinusHalf - kLatticeZetaHalf) / (2.0 * kPi * h);
  const double nb = -kLatticeZetaMinusHalf / (8.0 * kPi * h);
  out[static_cast<std::size_t>(1) * n] += nb;
  out[static_cast<std::size_t>(n - 1) * n] += nb;
  out[1] += nb;
  out[static_cast<std::size_t>(n - 1)] += nb;
  return out;
}

namespace {

// sup |R| over grid points with |x| <= radius.
double remainder_sup(const GreenEvaluator& g, int n, double radius) {
  const double ell = g.params().ell;
  const double h = ell / n;
  const int m = static_cast<int>(std::floor(radius / h));
  double sup = 0.0;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j) {
      const Vec2 x{h * i, h * j};
      if (x.norm() > radius) continue;
      sup = std::max(sup, std::abs(g.remainder(x)));
    }
  return sup;
}

}  // namespace

std::map<std::string, double> green_selftest(const GreenEvaluator& g, int grid_n) {
  if (grid_n < 128 || (grid_n & (grid_n - 1)) != 0)
    throw ParameterError("grid_n must be a power of two >= 128");
  const TorusParams& p = g.params();
  const double ell = p.ell;
  const int n = grid_n;
  const double h = ell / n;
  const std::size_t total = static_cast<std::size_t>(n) * n;

  std::vector<double> gs(total, 0.0);
  std::vector<double> gxs(total, 0.0);
  std::vector<double> gys(total, 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == 0 && j == 0) continue;
        const GreenValue v = g.at({h * static_cast<double>(i), h * j});
        const std::size_t idx = i * n + j;
        gs[idx] = v.value;
        gxs[idx] = v.gradient.x;
        gys[idx] = v.gradient.y;
      }
  });

  std::map<std::string, double> report;
  report["grid_n"] = n;

  // (a) int G with the origin cell integrated exactly for the log part.
  double sum = 0.0;
  double sgx = 0.0;
  double sgy = 0.0;
  double gmin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < total; ++k) {
    sum += gs[k];
    sgx += gxs[k];
    sgy += gys[k];
    gmin = std::min(gmin, gs[k]);
  }
  const double log_cell = -0.5 * std::log(2.0) - 1.5 + kPi / 4.0;
  const double cell = -h * h * (std::log(h) + log_cell) / (2.0 * kPi) + h * h * g.remainder_at_origin();
  const double integral = h * h * sum + cell;
  report["integral"] = integral;
  report["integral_residual"] = integral - 1.0 / (p.kappa * p.kappa);
  report["min_g"] = gmin;
  report["grad_sum_x"] = h * h * sgx;
  report["grad_sum_y"] = h * h * sgy;

  // (b) H*H against G away from the singular neighbourhood.
  const std::vector<double> hs = sample_h_kernel(p, n);
  std::vector<cplx> hc(hs.begin(), hs.end());
  Fft2 plan(n);
  plan.forward(hc);
  double hk_err = 0.0;
  const double dk = 2.0 * kPi / ell;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int m1 = fft_freq(i, n);
      const int m2 = fft_freq(j, n);
      if (std::max(std::abs(m1), std::abs(m2)) > n / 8) continue;
      const double s = p.kappa * p.kappa + dk * dk * (m1 * m1 + m2 * m2);
      const cplx coef = hc[static_cast<std::size_t>(i) * n + j] * (h * h);
      hk_err = std::max(hk_err, std::abs(coef - 1.0 / std::sqrt(s)));
    }
  report["hk_max_error"] = hk_err;
  for (auto& z : hc) z *= z;
  plan.backward(hc);
  const double conv_scale = h * h / static_cast<double>(total);
  double hh = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 x = min_image({h * i, h * j}, ell);
      if (x.norm() <= 4.0 * h) continue;
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      hh = std::max(hh, std::abs(hc[idx].real() * conv_scale - gs[idx]));
    }
  report["hh_max_residual"] = hh;

  // (c) sup |R| near the origin, stable under grid refinement.
  const double rsup = remainder_sup(g, n, ell / 8.0);
  const double rsup2 = remainder_sup(g, 2 * n, ell / 8.0);
  report["r_sup"] = rsup;
  report["r_sup_refined"] = rsup2;
  report["r_sup_change"] = std::abs(rsup2 - rsup);
  report["r_origin"] = g.remainder_at_origin();

  // Empirical constant of the O(|x|) remainder in G = -ln|x|/(2pi) + R(0) + O(|x|).
  double lin = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const double r = ell / 8.0 * k / 40.0;
    for (int d = 0; d < 8; ++d) {
      const double th = kPi * d / 8.0;
      const Vec2 x{r * std::cos(th), r * std::sin(th)};
      lin = std::max(lin, std::abs(g.remainder(x) - g.remainder_at_origin()) / r);
    }
  }
  report["remainder_linear_constant"] = lin;

  const bool pa = std::abs(report["integral_residual"]) < 1e-6;
  const bool pb = hh < 1e-4;
  const bool pc = std::isfinite(rsup) && report["r_sup_change"] < 1e-6;
  report["pass_integral"] = pa ? 1.0 : 0.0;
  report["pass_hh"] = pb ? 1.0 : 0.0;
  report["pass_remainder"] = pc ? 1.0 : 0.0;
  report["pass"] = (pa && pb && pc) ? 1.0 : 0.0;
  return report;
}

}  // namespace okdrop
