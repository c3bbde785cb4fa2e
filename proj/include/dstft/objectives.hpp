#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dstft/types.hpp"

namespace dstft {

/// Frames whose mean spectral power falls below this contribute kurtosis 1.
inline constexpr double kSilentFramePower = 1e-30;

struct ObjectiveValue {
  double kurtosis = 0.0;
  double coverage = 0.0;
  double combined = 0.0;
};

/// How the kurtosis and coverage ascent directions are merged.
struct Combiner {
  enum class Mode { WeightedSum, MinNorm };
  Mode mode = Mode::MinNorm;
  /// Weight of the kurtosis term. Used for the direction in WeightedSum mode
  /// and for the reported combined objective in both modes.
  double alpha = 0.5;

  double combine_values(double kurtosis, double coverage) const noexcept {
    return alpha * kurtosis + (1.0 - alpha) * coverage;
  }
};

/// Overlap weights: w_1 = t_2 - t_1, w_T = t_T - t_{T-1},
/// w_i = (t_{i+1} - t_{i-1}) / 2 otherwise. A single frame gets weight 1.
std::vector<double> frame_weights(const FrameLayout& layout);

/// Kurtosis of one frame's magnitude spectrum, mean|S|^4 / (mean|S|^2)^2.
/// Returns 1 for silent frames.
double frame_kurtosis(std::span<const Complex> frame);

/// Weighted mean of the per-frame kurtoses.
double kurtosis_objective(const ComplexSpectrogram& spec, const FrameLayout& layout);

/// Fraction of the signal covered by the windows,
///   clamp(sum_i min(lambda_i^eff, H~_{i+1}) / M, 0, 1),  H~_{T+1} = +inf,
/// where window i spans [a_i, a_i + lambda_i] with a_i = t_i + (N - lambda_i)/2
/// and lambda_i^eff is the length of that span inside [0, M].
double coverage_objective(const FrameLayout& layout, std::size_t signal_length);

/// Objective values plus the gradients of K and C w.r.t. (t, lambda).
///
/// The K gradient flows through the spectrogram and through the t-dependent
/// frame weights. The C gradient is piecewise linear; at a tie inside any
/// min/max/clamp the mean of the two one-sided derivatives is used.
struct ObjectiveEvaluation {
  ObjectiveValue value;
  GradientSet kurtosis_grad;
  GradientSet coverage_grad;
};

ObjectiveEvaluation evaluate_objectives(const Signal& signal, const FrameLayout& layout,
                                        const Combiner& combiner = {});

/// Convenience wrapper returning (grad K, grad C).
std::pair<GradientSet, GradientSet> objective_gradients(const Signal& signal,
                                                        const FrameLayout& layout);

/// Coverage value with its gradient; exposed for tests.
double coverage_with_gradient(const FrameLayout& layout, std::size_t signal_length,
                              GradientSet* grad);

/// Merges two ascent directions. WeightedSum: alpha g_K + (1 - alpha) g_C.
/// MinNorm: the minimum-norm point of the segment [g_K, g_C].
GradientSet combine_objectives(const GradientSet& grad_kurtosis, const GradientSet& grad_coverage,
                               const Combiner& combiner);

/// Mixing coefficient gamma* of the min-norm combination gamma g1 + (1-gamma) g2.
double min_norm_coefficient(const GradientSet& g1, const GradientSet& g2);

}  // namespace dstft
