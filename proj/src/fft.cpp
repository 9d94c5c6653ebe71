#include "okdrop/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "okdrop/error.hpp"

namespace okdrop {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft2::Fft2(int n) : n_(n), scratch_(static_cast<std::size_t>(n) * n) {
  if (n < 1) throw ParameterError("fft size must be positive");
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch_.data());
  fwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Fft2::~Fft2() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft2::forward(std::vector<cplx>& data) const {
  if (data.size() != scratch_.size()) throw ParameterError("fft buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void Fft2::backward(std::vector<cplx>& data) const {
  if (data.size() != scratch_.size()) throw ParameterError("fft buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
}

std::vector<cplx> fft2_real(const std::vector<double>& grid, int n) {
  std::vector<cplx> c(grid.begin(), grid.end());
  Fft2 plan(n);
  plan.forward(c);
  return c;
}

std::vector<double> ifft2_real(std::vector<cplx> coeffs, int n) {
  Fft2 plan(n);
  plan.backward(coeffs);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  std::vector<double> out(coeffs.size());
  std::transform(coeffs.begin(), coeffs.end(), out.begin(),
                 [scale](const cplx& z) { return z.real() * scale; });
  return out;
}

}  // namespace okdrop
