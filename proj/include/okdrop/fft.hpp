#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace okdrop {

using cplx = std::complex<double>;

/// Signed wavenumber index of FFT bin m on an n-point axis.
inline int fft_freq(int m, int n) { return m < n / 2 ? m : m - n; }

/// In-place n x n complex FFT (row-major, unnormalized). Plans are created
/// under a global lock; execution is thread-safe.
class Fft2 {
 public:
  explicit Fft2(int n);
  ~Fft2();
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  int size() const { return n_; }
  void forward(std::vector<cplx>& data) const;
  void backward(std::vector<cplx>& data) const;

 private:
  int n_;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
  std::vector<cplx> scratch_;
};

/// Forward transform of a real grid; returns unnormalized coefficients.
std::vector<cplx> fft2_real(const std::vector<double>& grid, int n);

/// Inverse transform (with 1/n^2) keeping the real part.
std::vector<double> ifft2_real(std::vector<cplx> coeffs, int n);

}  // namespace okdrop
