#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "dstft/objectives.hpp"
#include "dstft/types.hpp"

namespace dstft {

/// Minimum spacing enforced between consecutive frame positions.
inline constexpr double kMinHop = 1e-3;
/// Consecutive small-change iterations required to declare convergence.
inline constexpr int kConvergenceWindow = 10;

struct OptimizerConfig {
  double lr_position = 0.1;  // samples per unit gradient
  double lr_length = 0.1;    // samples per unit gradient
  int max_iters = 500;
  double tolerance = 1e-12;  // relative change of the combined objective
  Combiner combiner;
  bool share_parameters = false;
  double lambda_min = 2.0;  // samples; the upper bound is the support N
};

/// Throws ParameterError for negative rates, lambda_min < 2, non-positive tolerance.
void validate(const OptimizerConfig& config);

struct TraceRecord {
  int iteration = 0;
  FrameLayout layout;
  ObjectiveValue objective;
  double grad_t_inf = 0.0;       // infinity norm of the combined direction, positions
  double grad_lambda_inf = 0.0;  // infinity norm of the combined direction, lengths
};

struct OptimizationTrace {
  std::vector<TraceRecord> records;
};

/// Classical-STFT initialization: T frames of length N whose window centers
/// sit at (i + 1/2) M / T, i.e. t_i = (i + 1/2) M / T - N/2.
FrameLayout init_uniform(std::size_t signal_length, std::size_t frames, int support_n,
                         WindowKind window);

struct StepResult {
  FrameLayout layout;        // updated, projected layout
  ObjectiveValue objective;  // objectives at the input layout
  GradientSet direction;     // combined ascent direction at the input layout
};

/// One projected gradient-ascent step. Throws OptimizerError on a non-finite
/// gradient or objective.
StepResult step(const Signal& signal, const FrameLayout& layout, const OptimizerConfig& config);

/// Projects a layout onto the feasible set: lambda in [lambda_min, N],
/// t in [-N/2, M) and t strictly increasing by at least kMinHop. A layout that
/// is already feasible is returned unchanged.
void project(FrameLayout& layout, std::size_t signal_length, double lambda_min);

struct RunResult {
  FrameLayout layout;
  OptimizationTrace trace;
};

/// Runs `step` from init_uniform until max_iters steps or until the relative
/// change of the combined objective stays below tolerance for
/// kConvergenceWindow consecutive iterations.
RunResult run(const Signal& signal, const OptimizerConfig& config, std::size_t frames,
              int support_n, WindowKind window = WindowKind::Hann);

/// Same loop starting from an explicit layout.
RunResult run_from(const Signal& signal, const OptimizerConfig& config, FrameLayout initial);

}  // namespace dstft
