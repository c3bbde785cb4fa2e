#include "dstft/fft.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <utility>

#include "dstft/errors.hpp"

namespace dstft {

FourierPlan::FourierPlan(std::size_t size)
    : size_(size), radix2_(size > 0 && std::has_single_bit(size)), twiddles_(size) {
  if (size == 0) throw ParameterError("DFT size must be positive");
  const double step = -2.0 * std::numbers::pi / static_cast<double>(size);
  for (std::size_t k = 0; k < size; ++k) {
    twiddles_[k] = std::polar(1.0, step * static_cast<double>(k));
  }
  if (radix2_) {
    const int bits = std::countr_zero(size);
    bit_reverse_.resize(size);
    for (std::size_t k = 0; k < size; ++k) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((k >> b) & 1u) << (bits - 1 - b);
      bit_reverse_[k] = r;
    }
  }
}

void FourierPlan::forward(std::span<Complex> data, std::span<Complex> scratch) const {
  const std::size_t n = size_;
  if (data.size() != n) throw ParameterError("DFT input has wrong length");

  if (!radix2_) {
    if (scratch.size() < n) throw ParameterError("DFT scratch buffer too small");
    for (std::size_t f = 0; f < n; ++f) {
      Complex acc{0.0, 0.0};
      std::size_t idx = 0;  // k*f mod N
      for (std::size_t k = 0; k < n; ++k) {
        acc += data[k] * twiddles_[idx];
        idx += f;
        if (idx >= n) idx -= n;
      }
      scratch[f] = acc;
    }
    std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(n), data.begin());
    return;
  }

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = bit_reverse_[k];
    if (k < r) std::swap(data[k], data[r]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const Complex w = twiddles_[j * stride];
        const Complex a = data[start + j];
        const Complex b = data[start + j + half] * w;
        data[start + j] = a + b;
        data[start + j + half] = a - b;
      }
    }
  }
}

}  // namespace dstft
