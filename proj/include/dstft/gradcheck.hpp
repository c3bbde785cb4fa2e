#pragma once

#include <cstdint>
#include <vector>

#include "dstft/types.hpp"

namespace dstft {

struct GradcheckOptions {
  std::uint64_t seed = 0;
  int cases = 100;
  double step = 1e-4;
  double rtol = 1e-4;
};

struct GradcheckReport {
  int cases = 0;
  double worst_t = 0.0;
  double worst_lambda = 0.0;
  std::vector<std::uint64_t> failing_seeds;

  bool passed() const noexcept { return failing_seeds.empty(); }
};

/// Random transform instance used by the gradient check: signal, layout with
/// positions at least 1e-2 away from integers, and per-bin loss weights rho
/// for L = sum rho[i,f] |S[i,f]|^2.
struct GradcheckInstance {
  Signal signal;
  FrameLayout layout;
  std::vector<double> loss_weights;
};

GradcheckInstance make_gradcheck_instance(std::uint64_t seed);

/// Compares dstft_backward against central finite differences of the forward
/// transform over `cases` instances seeded seed, seed+1, ...
///
/// A component's relative error is |analytic - fd| / max(|analytic|, |fd|, floor)
/// with floor = 1e-3 times the largest analytic component of the instance.
GradcheckReport run_gradcheck(const GradcheckOptions& options);

}  // namespace dstft
