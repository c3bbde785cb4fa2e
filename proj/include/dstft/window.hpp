#pragma once

#include <string_view>

namespace dstft {

enum class WindowKind { Hann, Gaussian };

std::string_view to_string(WindowKind kind);
WindowKind parse_window_kind(std::string_view name);

/// Window value together with its partials w.r.t. the time argument and the
/// continuous window length.
struct WindowEval {
  double value = 0.0;
  double d_du = 0.0;
  double d_dlambda = 0.0;
};

/// Evaluates a tapering window centered at (N-1)/2 inside an integer support N.
///
/// `u` is the (possibly fractional) sample offset inside the support and
/// `lambda` the continuous window length in (0, N]. The Hann window vanishes
/// outside |u - c| <= lambda/2; the Gaussian (sigma = lambda/6) is truncated
/// to u in [0, N-1].
///
/// Throws ParameterError for non-finite `u`, for `lambda` outside (0, N] and
/// for N < 2.
WindowEval eval_window(WindowKind kind, double u, int support_n, double lambda);

/// Same as eval_window without argument validation; used by the transform
/// kernels once the layout has been validated.
WindowEval eval_window_unchecked(WindowKind kind, double u, int support_n, double lambda) noexcept;

}  // namespace dstft
