#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "okdrop/params.hpp"
#include "okdrop/vec2.hpp"

namespace okdrop {

struct GreenValue {
  double value = 0.0;
  Vec2 gradient;
};

/// Screened Green's function of -Laplace + kappa^2 on the torus [0, ell)^2.
///
/// G is split with a heat-kernel cutoff tau: the far part has Fourier
/// coefficients exp(-tau s)/s with s = kappa^2 + |k|^2 and is tabulated by FFT
/// (gradient by spectral differentiation) and read back with periodic
/// 6-point Lagrange interpolation; the near part is a short-time heat-kernel
/// integral evaluated in closed form by an exponential-integral series, which
/// also yields R(x) = G(x) + ln|x| / (2 pi) without cancellation.
///
/// Immutable after construction; copies share the tables.
class GreenEvaluator {
 public:
  GreenEvaluator(const TorusParams& params, int mode_count, int table_size = 1024);

  const TorusParams& params() const { return params_; }
  int mode_count() const { return mode_count_; }
  int table_size() const { return table_size_; }
  double split_time() const { return tau_; }

  /// 1 / (kappa^2 + |k|^2) at k = 2 pi (m1, m2) / ell.
  double spectral_coefficient(int m1, int m2) const;

  /// G and its gradient at a torus displacement; throws SingularityError at 0.
  GreenValue at(const Vec2& x) const;
  double value(const Vec2& x) const { return at(x).value; }

  /// Smooth remainder R(x) = G(x) + ln|x| / (2 pi), meaningful for |x| <= ell/4.
  double remainder(const Vec2& x) const;
  Vec2 remainder_gradient(const Vec2& x) const;
  double remainder_at_origin() const { return r0_; }

  /// G on the spectral branch regardless of |x| (used for branch checks).
  GreenValue spectral_branch(const Vec2& x) const;

  /// Min of G over a 128^2 sample grid (attained at the cell corner).
  double min_value() const { return min_value_; }

 private:
  struct Tables;

  GreenValue far_part(const Vec2& x) const;
  GreenValue near_images(const Vec2& x, bool skip_origin_image) const;

  TorusParams params_;
  int mode_count_;
  int table_size_;
  double tau_;
  double near_radius2_;
  int image_range_;
  double r0_ = 0.0;
  double min_value_ = 0.0;
  std::shared_ptr<const Tables> tables_;
};

GreenEvaluator build_green(const TorusParams& params, int mode_count = 256);

GreenValue green_at(const GreenEvaluator& g, const Vec2& x);

/// H(x) = (1/2pi) sum_n exp(-kappa|x - n ell|) / |x - n ell| over |n|_inf <= cutoff.
double h_kernel_at(const TorusParams& params, const Vec2& x, int image_cutoff);

/// Rigorous bound on the images dropped by h_kernel_at at the given cutoff.
double h_kernel_tail_bound(const TorusParams& params, int image_cutoff);

/// Smallest cutoff (>= 2) whose tail bound is below tol.
int h_kernel_cutoff(const TorusParams& params, double tol = 1e-10);

/// H sampled on an n x n grid (row-major, index i*n + j at (i h, j h)),
/// with the origin and its four neighbours carrying the corrected-trapezoid
/// weights for the 1/(2 pi |x|) singularity. Multiplying by h^2 and summing
/// against smooth data approximates the integral; the DFT approximates 1/sqrt(s).
std::vector<double> sample_h_kernel(const TorusParams& params, int n);

/// Residuals of the identities int G = kappa^-2, H*H = G and boundedness of R.
std::map<std::string, double> green_selftest(const GreenEvaluator& g, int grid_n);

}  // namespace okdrop
