#pragma once

#include <span>
#include <vector>

#include "dstft/types.hpp"

namespace dstft {

/// Classical STFT by direct summation over integer start indices:
///   S[i,f] = sum_{k<N} w[k] s[b_i + k] e^{-2j pi k f / N}
/// with w[k] the centered window of length `lambda`. Out-of-range samples
/// read as zero. Serial, O(T N^2); this is the baseline the fractional
/// transform reduces to at integer positions.
ComplexSpectrogram classical_stft(const Signal& signal, std::span<const long long> start_indices,
                                  int support_n, WindowKind window, double lambda);

/// Fractional-position STFT. For frame i with p = floor(t_i), d = t_i - p:
///   S[i,f] = sum_k w_{N,lambda_i}[k - d] s[p + k] e^{-2j pi (k - d) f / N}
/// The sum runs over k in [0, N]; the k = N term folds onto k = 0 modulo N,
/// so the frame is one size-N DFT followed by the phase e^{+2j pi d f / N}.
/// Frames are evaluated in parallel; results do not depend on thread count.
ComplexSpectrogram dstft_forward(const Signal& signal, const FrameLayout& layout);

/// Backward pass for a real scalar loss L(S).
///
/// `cotangent[i,f]` is the conjugate Wirtinger derivative dL/d conj(S[i,f]),
/// i.e. (dL/dRe S + j dL/dIm S) / 2. With that convention
///   d_t[i]      = sum_f 2 Re(conj(cot[i,f]) dS[i,f]/dt_i)
///   d_lambda[i] = sum_f 2 Re(conj(cot[i,f]) dS[i,f]/dlambda_i)
/// are exactly dL/dt_i and dL/dlambda_i. For L = |S[i,f]|^2 the cotangent is
/// S[i,f] itself.
///
/// The position kernel is -w'(u) + (2j pi f / N) w(u). Note the 1/N: it comes
/// from differentiating e^{-2j pi (k - d) f / N} in d.
GradientSet dstft_backward(const Signal& signal, const FrameLayout& layout,
                           const ComplexSpectrogram& cotangent);

/// Spectrum together with its partials w.r.t. every frame's t_i and lambda_i.
struct FrameJacobian {
  ComplexSpectrogram value;
  ComplexSpectrogram d_t;
  ComplexSpectrogram d_lambda;
};

/// dS/dt_i and dS/dlambda_i for every bin, evaluated with the fast path.
FrameJacobian dstft_jacobian(const Signal& signal, const FrameLayout& layout);

/// H~_1 = t_1 + (N - lambda_1)/2, H~_i = (t_i - t_{i-1}) + (lambda_i - lambda_{i-1})/2.
std::vector<double> true_hop_lengths(const FrameLayout& layout);

/// Number of worker threads used by the parallel kernels (OpenMP).
int thread_count();
/// Sets the worker count; values <= 0 restore the default (all cores).
void set_thread_count(int threads);

namespace reference {

/// Serial direct summation of the fractional-position STFT, with the phase
/// e^{-2j pi (k - d) f / N} evaluated term by term (no DFT factoring).
ComplexSpectrogram dstft_forward(const Signal& signal, const FrameLayout& layout);

/// Serial direct summation of dS/dt and dS/dlambda using the kernels
/// -w' + (2j pi f / N) w and dw/dlambda.
FrameJacobian dstft_jacobian(const Signal& signal, const FrameLayout& layout);

/// Serial backward pass built on reference::dstft_jacobian.
GradientSet dstft_backward(const Signal& signal, const FrameLayout& layout,
                           const ComplexSpectrogram& cotangent);

}  // namespace reference

}  // namespace dstft
