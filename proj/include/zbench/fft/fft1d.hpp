#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace zbench::fft {

using cplx = std::complex<double>;

bool is_power_of_two(int n);

/// In-place iterative radix-2 transform of a power-of-two length, on strided data.
/// Forward uses exp(-2 pi i jk / n); inverse is unnormalized.
class Fft1d {
 public:
  explicit Fft1d(int n);

  int size() const { return n_; }
  void forward(cplx* data, std::ptrdiff_t stride = 1) const { run(data, stride, false); }
  void inverse(cplx* data, std::ptrdiff_t stride = 1) const { run(data, stride, true); }

 private:
  void run(cplx* data, std::ptrdiff_t stride, bool inverse) const;

  int n_;
  std::vector<cplx> twiddle_;  // exp(-2 pi i k / n), k < n/2
  std::vector<int> bitrev_;
};

}  // namespace zbench::fft
