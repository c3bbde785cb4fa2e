#include "dstft/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dstft/transform.hpp"

namespace dstft {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

double quadratic_loss(const GradcheckInstance& inst, const FrameLayout& layout) {
  const ComplexSpectrogram spec = dstft_forward(inst.signal, layout);
  double loss = 0.0;
  for (std::size_t k = 0; k < spec.data().size(); ++k) {
    loss += inst.loss_weights[k] * std::norm(spec.data()[k]);
  }
  return loss;
}

}  // namespace

GradcheckInstance make_gradcheck_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  constexpr int kSupports[] = {16, 32, 64};
  const int n = kSupports[rng() % 3];
  const std::size_t m = 64 + rng() % 449;
  const std::size_t frames = 1 + rng() % 4;

  GradcheckInstance inst;
  inst.signal.samples.resize(m);
  for (double& s : inst.signal.samples) s = uniform(rng, -1.0, 1.0);

  FrameLayout& layout = inst.layout;
  layout.support_n = n;
  layout.window = rng() % 2 == 0 ? WindowKind::Hann : WindowKind::Gaussian;
  // Integer anchors at least 2 apart, then a fractional part in [0.01, 0.99].
  const double lo = -0.5 * n;
  const double hi = static_cast<double>(m) - 2.0;
  std::vector<double> anchors(frames);
  for (double& a : anchors) a = std::floor(uniform(rng, lo, hi));
  std::sort(anchors.begin(), anchors.end());
  for (std::size_t i = 1; i < frames; ++i) anchors[i] = std::max(anchors[i], anchors[i - 1] + 2.0);
  for (std::size_t i = 0; i < frames; ++i) {
    layout.positions.push_back(anchors[i] + uniform(rng, 0.01, 0.99));
    layout.lengths.push_back(uniform(rng, 0.25 * n, n - 1e-3));
  }
  // Clamp to the valid range without touching the fractional parts.
  while (layout.positions.back() >= static_cast<double>(m)) {
    for (double& t : layout.positions) t -= 1.0;
  }

  inst.loss_weights.resize(frames * static_cast<std::size_t>(n));
  for (double& w : inst.loss_weights) w = uniform(rng, 0.0, 1.0);
  return inst;
}

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
  GradcheckReport report;
  report.cases = std::max(options.cases, 0);
  for (int c = 0; c < report.cases; ++c) {
    const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(c);
    const GradcheckInstance inst = make_gradcheck_instance(seed);
    const FrameLayout& layout = inst.layout;

    const ComplexSpectrogram spec = dstft_forward(inst.signal, layout);
    ComplexSpectrogram cot(spec.frames(), spec.bins());
    for (std::size_t k = 0; k < spec.data().size(); ++k) {
      cot.data()[k] = inst.loss_weights[k] * spec.data()[k];
    }
    const GradientSet analytic = dstft_backward(inst.signal, layout, cot);

    double scale = 0.0;
    for (std::size_t i = 0; i < layout.frames(); ++i) {
      scale = std::max({scale, std::abs(analytic.d_t[i]), std::abs(analytic.d_lambda[i])});
    }
    const double floor = std::max(1e-3 * scale, 1e-300);

    bool failed = false;
    for (std::size_t i = 0; i < layout.frames(); ++i) {
      for (int which = 0; which < 2; ++which) {
        FrameLayout plus = layout;
        FrameLayout minus = layout;
        auto& p = which == 0 ? plus.positions[i] : plus.lengths[i];
        auto& q = which == 0 ? minus.positions[i] : minus.lengths[i];
        p += options.step;
        q -= options.step;
        const double fd =
            (quadratic_loss(inst, plus) - quadratic_loss(inst, minus)) / (2.0 * options.step);
        const double a = which == 0 ? analytic.d_t[i] : analytic.d_lambda[i];
        const double err = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), floor});
        double& worst = which == 0 ? report.worst_t : report.worst_lambda;
        worst = std::max(worst, err);
        // err >= rtol fails, so rtol = 0 can never pass
        if (!(err < options.rtol)) failed = true;
      }
    }
    if (failed) report.failing_seeds.push_back(seed);
  }
  return report;
}

}  // namespace dstft
