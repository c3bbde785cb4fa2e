#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dstft/types.hpp"

namespace dstft {

/// Forward DFT of a fixed size, X[f] = sum_k x[k] e^{-2j pi k f / N}.
///
/// Power-of-two sizes use an iterative radix-2 transform; other sizes fall
/// back to a direct O(N^2) sum over the precomputed twiddle table. A plan is
/// immutable after construction and may be shared across threads.
class FourierPlan {
 public:
  explicit FourierPlan(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  bool is_radix2() const noexcept { return radix2_; }

  /// In-place forward transform. `scratch` must hold size() elements and is
  /// only touched on the non-radix-2 path.
  void forward(std::span<Complex> data, std::span<Complex> scratch) const;

 private:
  std::size_t size_;
  bool radix2_;
  std::vector<Complex> twiddles_;  // e^{-2j pi k / N}, k in [0, N)
  std::vector<std::size_t> bit_reverse_;
};

}  // namespace dstft
