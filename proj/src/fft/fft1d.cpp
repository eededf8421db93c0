#include "zbench/fft/fft1d.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "zbench/common.hpp"

namespace zbench::fft {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

Fft1d::Fft1d(int n) : n_(n) {
  if (!is_power_of_two(n)) throw ConfigError(fmt::format("FFT length {} is not a power of two", n));
  twiddle_.resize(n / 2);
  for (int k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * k / n;
    twiddle_[k] = {std::cos(angle), std::sin(angle)};
  }
  bitrev_.resize(n);
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  for (int k = 0; k < n; ++k) {
    int r = 0;
    for (int b = 0; b < bits; ++b) r |= ((k >> b) & 1) << (bits - 1 - b);
    bitrev_[k] = r;
  }
}

void Fft1d::run(cplx* data, std::ptrdiff_t stride, bool inverse) const {
  auto at = [&](int k) -> cplx& { return data[k * stride]; };
  for (int k = 0; k < n_; ++k) {
    if (k < bitrev_[k]) std::swap(at(k), at(bitrev_[k]));
  }
  for (int len = 2; len <= n_; len <<= 1) {
    const int half = len / 2;
    const int step = n_ / len;
    for (int start = 0; start < n_; start += len) {
      for (int k = 0; k < half; ++k) {
        cplx w = twiddle_[k * step];
        if (inverse) w = std::conj(w);
        const cplx a = at(start + k);
        const cplx b = at(start + k + half) * w;
        at(start + k) = a + b;
        at(start + k + half) = a - b;
      }
    }
  }
}

}  // namespace zbench::fft
