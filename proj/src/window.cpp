#include "dstft/window.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dstft/errors.hpp"

namespace dstft {

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

std::string_view to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::Hann:
      return "hann";
    case WindowKind::Gaussian:
      return "gauss";
  }
  return "unknown";
}

WindowKind parse_window_kind(std::string_view name) {
  if (name == "hann") return WindowKind::Hann;
  if (name == "gauss" || name == "gaussian") return WindowKind::Gaussian;
  throw ParameterError("unknown window kind '" + std::string(name) + "' (expected hann|gauss)");
}

WindowEval eval_window_unchecked(WindowKind kind, double u, int support_n, double lambda) noexcept {
  const double center = 0.5 * static_cast<double>(support_n - 1);
  const double x = u - center;
  WindowEval out;
  switch (kind) {
    case WindowKind::Hann: {
      // Boundary points evaluate to exactly zero for all three outputs.
      if (std::abs(x) >= 0.5 * lambda) return out;
      const double arg = 2.0 * kPi * x / lambda;
      const double s = std::sin(arg);
      out.value = 0.5 * (1.0 + std::cos(arg));
      out.d_du = -kPi / lambda * s;
      out.d_dlambda = kPi * x / (lambda * lambda) * s;
      return out;
    }
    case WindowKind::Gaussian: {
      if (u < 0.0 || u > static_cast<double>(support_n - 1)) return out;
      // exp(-x^2 / (2 (lambda/6)^2)) = exp(-18 x^2 / lambda^2)
      const double inv = 1.0 / lambda;
      const double g = std::exp(-18.0 * x * x * inv * inv);
      out.value = g;
      out.d_du = -36.0 * x * inv * inv * g;
      out.d_dlambda = 36.0 * x * x * inv * inv * inv * g;
      return out;
    }
  }
  return out;
}

WindowEval eval_window(WindowKind kind, double u, int support_n, double lambda) {
  if (!std::isfinite(u)) throw ParameterError("window argument u must be finite");
  if (support_n < 2) throw ParameterError("window support N must be >= 2");
  if (!(lambda > 0.0) || lambda > static_cast<double>(support_n)) {
    throw ParameterError("window length lambda must lie in (0, N]");
  }
  return eval_window_unchecked(kind, u, support_n, lambda);
}

}  // namespace dstft
