// Serial direct-summation kernels. These follow the defining sums term by
// term and are the oracle the parallel kernels are tested against.
#include <cmath>
#include <numbers>
#include <string>

#include "dstft/errors.hpp"
#include "dstft/transform.hpp"

namespace dstft::reference {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{-2j pi u f / N}, with u f reduced modulo N before scaling.
Complex kernel_phase(double u, std::size_t f, int n) {
  const double reduced = std::fmod(u * static_cast<double>(f), static_cast<double>(n));
  return std::polar(1.0, -kTwoPi * reduced / n);
}

}  // namespace

ComplexSpectrogram dstft_forward(const Signal& signal, const FrameLayout& layout) {
  return reference::dstft_jacobian(signal, layout).value;
}

FrameJacobian dstft_jacobian(const Signal& signal, const FrameLayout& layout) {
  validate(signal);
  validate(layout, signal.size());
  const int n = layout.support_n;
  const std::size_t bins = static_cast<std::size_t>(n);
  FrameJacobian out{ComplexSpectrogram(layout.frames(), bins),
                    ComplexSpectrogram(layout.frames(), bins),
                    ComplexSpectrogram(layout.frames(), bins)};

  for (std::size_t i = 0; i < layout.frames(); ++i) {
    const double t = layout.positions[i];
    const long long p = static_cast<long long>(std::floor(t));
    const double delta = t - std::floor(t);
    for (std::size_t f = 0; f < bins; ++f) {
      const Complex spin(0.0, kTwoPi * static_cast<double>(f) / n);
      Complex value{0.0, 0.0};
      Complex d_t{0.0, 0.0};
      Complex d_lambda{0.0, 0.0};
      for (int k = 0; k <= n; ++k) {
        const double u = k - delta;
        const WindowEval w = eval_window(layout.window, u, n, layout.lengths[i]);
        const double s = signal.at_padded(p + k);
        const Complex e = kernel_phase(u, f, n);
        value += w.value * s * e;
        d_t += (-w.d_du + spin * w.value) * s * e;
        d_lambda += w.d_dlambda * s * e;
      }
      out.value(i, f) = value;
      out.d_t(i, f) = d_t;
      out.d_lambda(i, f) = d_lambda;
    }
  }
  return out;
}

GradientSet dstft_backward(const Signal& signal, const FrameLayout& layout,
                           const ComplexSpectrogram& cotangent) {
  if (cotangent.frames() != layout.frames() ||
      cotangent.bins() != static_cast<std::size_t>(layout.support_n)) {
    throw ParameterError("cotangent shape does not match forward output");
  }
  const FrameJacobian jac = reference::dstft_jacobian(signal, layout);
  GradientSet grad(layout.frames());
  for (std::size_t i = 0; i < layout.frames(); ++i) {
    for (std::size_t f = 0; f < cotangent.bins(); ++f) {
      const Complex c = std::conj(cotangent(i, f));
      grad.d_t[i] += 2.0 * std::real(c * jac.d_t(i, f));
      grad.d_lambda[i] += 2.0 * std::real(c * jac.d_lambda(i, f));
    }
  }
  return grad;
}

}  // namespace dstft::reference
