#include "dstft/transform.hpp"

#include <cmath>
#include <numbers>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dstft/errors.hpp"
#include "dstft/fft.hpp"

namespace dstft {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct FrameBuffers {
  explicit FrameBuffers(std::size_t n) : value(n), d_u(n), d_lambda(n), scratch(n) {}
  std::vector<Complex> value;
  std::vector<Complex> d_u;
  std::vector<Complex> d_lambda;
  std::vector<Complex> scratch;
};

enum class Want { Value, All };

// Windowed slices for frame i, folded to length N, transformed and rotated by
// e^{+2j pi d f / N}. Fills value (and d_u, d_lambda when requested).
void transform_frame(const Signal& signal, const FrameLayout& layout, std::size_t frame,
                     const FourierPlan& plan, FrameBuffers& buf, Want want) {
  const int n = layout.support_n;
  const double t = layout.positions[frame];
  const double lambda = layout.lengths[frame];
  const double floor_t = std::floor(t);
  const long long p = static_cast<long long>(floor_t);
  const double delta = t - floor_t;
  const bool all = want == Want::All;

  for (int k = 0; k < n; ++k) {
    buf.value[k] = 0.0;
    if (all) buf.d_u[k] = buf.d_lambda[k] = 0.0;
  }
  for (int k = 0; k <= n; ++k) {
    const double s = signal.at_padded(p + k);
    if (s == 0.0) continue;
    const WindowEval w = eval_window_unchecked(layout.window, k - delta, n, lambda);
    const int slot = k == n ? 0 : k;
    buf.value[slot] += w.value * s;
    if (all) {
      buf.d_u[slot] += w.d_du * s;
      buf.d_lambda[slot] += w.d_dlambda * s;
    }
  }

  plan.forward(buf.value, buf.scratch);
  if (all) {
    plan.forward(buf.d_u, buf.scratch);
    plan.forward(buf.d_lambda, buf.scratch);
  }
  if (delta == 0.0) return;
  for (int f = 0; f < n; ++f) {
    const Complex phase = std::polar(1.0, kTwoPi * std::fmod(delta * f, static_cast<double>(n)) / n);
    buf.value[f] *= phase;
    if (all) {
      buf.d_u[f] *= phase;
      buf.d_lambda[f] *= phase;
    }
  }
}

void check_cotangent(const ComplexSpectrogram& cotangent, const FrameLayout& layout) {
  if (cotangent.frames() != layout.frames() ||
      cotangent.bins() != static_cast<std::size_t>(layout.support_n)) {
    throw ParameterError("cotangent shape " + std::to_string(cotangent.frames()) + "x" +
                         std::to_string(cotangent.bins()) + " does not match forward output " +
                         std::to_string(layout.frames()) + "x" +
                         std::to_string(layout.support_n));
  }
}

}  // namespace

ComplexSpectrogram classical_stft(const Signal& signal, std::span<const long long> start_indices,
                                  int support_n, WindowKind window, double lambda) {
  if (start_indices.empty()) throw ParameterError("classical_stft: empty start-index sequence");
  validate(signal);
  const std::size_t n = static_cast<std::size_t>(support_n);
  std::vector<double> taper(n);
  for (std::size_t k = 0; k < n; ++k) {
    taper[k] = eval_window(window, static_cast<double>(k), support_n, lambda).value;
  }
  ComplexSpectrogram out(start_indices.size(), n);
  for (std::size_t i = 0; i < start_indices.size(); ++i) {
    for (std::size_t f = 0; f < n; ++f) {
      Complex acc{0.0, 0.0};
      for (std::size_t k = 0; k < n; ++k) {
        const double s = signal.at_padded(start_indices[i] + static_cast<long long>(k));
        const double angle = -kTwoPi * static_cast<double>((k * f) % n) / static_cast<double>(n);
        acc += taper[k] * s * std::polar(1.0, angle);
      }
      out(i, f) = acc;
    }
  }
  return out;
}

ComplexSpectrogram dstft_forward(const Signal& signal, const FrameLayout& layout) {
  validate(signal);
  validate(layout, signal.size());
  const std::size_t n = static_cast<std::size_t>(layout.support_n);
  const long long frames = static_cast<long long>(layout.frames());
  const FourierPlan plan(n);
  ComplexSpectrogram out(layout.frames(), n);

#pragma omp parallel
  {
    FrameBuffers buf(n);
#pragma omp for schedule(static)
    for (long long i = 0; i < frames; ++i) {
      const auto frame = static_cast<std::size_t>(i);
      transform_frame(signal, layout, frame, plan, buf, Want::Value);
      std::copy(buf.value.begin(), buf.value.end(), out.row(frame).begin());
    }
  }
  return out;
}

FrameJacobian dstft_jacobian(const Signal& signal, const FrameLayout& layout) {
  validate(signal);
  validate(layout, signal.size());
  const std::size_t n = static_cast<std::size_t>(layout.support_n);
  const long long frames = static_cast<long long>(layout.frames());
  const FourierPlan plan(n);
  FrameJacobian out{ComplexSpectrogram(layout.frames(), n), ComplexSpectrogram(layout.frames(), n),
                    ComplexSpectrogram(layout.frames(), n)};

#pragma omp parallel
  {
    FrameBuffers buf(n);
#pragma omp for schedule(static)
    for (long long i = 0; i < frames; ++i) {
      const auto frame = static_cast<std::size_t>(i);
      transform_frame(signal, layout, frame, plan, buf, Want::All);
      for (std::size_t f = 0; f < n; ++f) {
        const Complex s = buf.value[f];
        out.value(frame, f) = s;
        out.d_t(frame, f) = -buf.d_u[f] + Complex(0.0, kTwoPi * static_cast<double>(f) / n) * s;
        out.d_lambda(frame, f) = buf.d_lambda[f];
      }
    }
  }
  return out;
}

GradientSet dstft_backward(const Signal& signal, const FrameLayout& layout,
                           const ComplexSpectrogram& cotangent) {
  validate(signal);
  validate(layout, signal.size());
  check_cotangent(cotangent, layout);
  const std::size_t n = static_cast<std::size_t>(layout.support_n);
  const long long frames = static_cast<long long>(layout.frames());
  const FourierPlan plan(n);
  GradientSet grad(layout.frames());

#pragma omp parallel
  {
    FrameBuffers buf(n);
#pragma omp for schedule(static)
    for (long long i = 0; i < frames; ++i) {
      const auto frame = static_cast<std::size_t>(i);
      const auto cot = cotangent.row(frame);
      bool any = false;
      for (const Complex& c : cot) any = any || c != Complex{0.0, 0.0};
      if (!any) continue;
      transform_frame(signal, layout, frame, plan, buf, Want::All);
      double d_t = 0.0;
      double d_lambda = 0.0;
      for (std::size_t f = 0; f < n; ++f) {
        const Complex ds_dt =
            -buf.d_u[f] + Complex(0.0, kTwoPi * static_cast<double>(f) / n) * buf.value[f];
        d_t += 2.0 * std::real(std::conj(cot[f]) * ds_dt);
        d_lambda += 2.0 * std::real(std::conj(cot[f]) * buf.d_lambda[f]);
      }
      grad.d_t[frame] = d_t;
      grad.d_lambda[frame] = d_lambda;
    }
  }
  return grad;
}

std::vector<double> true_hop_lengths(const FrameLayout& layout) {
  const std::size_t frames = layout.frames();
  std::vector<double> hops(frames);
  if (frames == 0) return hops;
  const double n = static_cast<double>(layout.support_n);
  hops[0] = layout.positions[0] + 0.5 * (n - layout.lengths[0]);
  for (std::size_t i = 1; i < frames; ++i) {
    hops[i] = (layout.positions[i] - layout.positions[i - 1]) +
              0.5 * (layout.lengths[i] - layout.lengths[i - 1]);
  }
  return hops;
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_thread_count(int threads) {
#ifdef _OPENMP
  omp_set_num_threads(threads > 0 ? threads : omp_get_num_procs());
#else
  (void)threads;
#endif
}

}  // namespace dstft
