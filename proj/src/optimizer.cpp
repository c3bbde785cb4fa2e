#include "dstft/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dstft/errors.hpp"

namespace dstft {

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void require_finite(const GradientSet& g, const char* what) {
  for (std::size_t i = 0; i < g.frames(); ++i) {
    if (!std::isfinite(g.d_t[i]) || !std::isfinite(g.d_lambda[i])) {
      throw OptimizerError(std::string("non-finite ") + what + " gradient at frame " +
                           std::to_string(i));
    }
  }
}

// Shared-parameter projection: keeps one hop and one length for all frames.
void project_shared(FrameLayout& layout, std::size_t signal_length, double lambda_min) {
  const std::size_t frames = layout.frames();
  const double n = static_cast<double>(layout.support_n);
  const double lower = -0.5 * n;
  const double upper = static_cast<double>(signal_length) - kMinHop;

  const double lambda = std::clamp(layout.lengths.front(), lambda_min, n);
  if (lambda != layout.lengths.front()) std::fill(layout.lengths.begin(), layout.lengths.end(), lambda);

  auto& t = layout.positions;
  if (frames == 1) {
    t[0] = std::clamp(t[0], lower, upper);
    return;
  }
  double origin = t.front();
  double hop = (t.back() - t.front()) / static_cast<double>(frames - 1);
  bool rebuild = false;
  if (hop < kMinHop) {
    hop = kMinHop;
    rebuild = true;
  }
  const double span = hop * static_cast<double>(frames - 1);
  if (span > upper - lower) {
    hop = (upper - lower) / static_cast<double>(frames - 1);
    origin = lower;
    rebuild = true;
  } else if (origin < lower) {
    origin = lower;
    rebuild = true;
  } else if (origin + span > upper) {
    origin = upper - span;
    rebuild = true;
  }
  if (rebuild) {
    for (std::size_t i = 0; i < frames; ++i) t[i] = origin + hop * static_cast<double>(i);
  }
}

}  // namespace

void validate(const OptimizerConfig& config) {
  if (!(config.lr_position >= 0.0) || !(config.lr_length >= 0.0)) {
    throw ParameterError("learning rates must be non-negative");
  }
  if (config.max_iters < 0) throw ParameterError("max_iters must be non-negative");
  if (!(config.tolerance > 0.0)) throw ParameterError("tolerance must be positive");
  if (!(config.lambda_min >= 2.0)) throw ParameterError("lambda_min must be >= 2 samples");
  if (config.combiner.mode == Combiner::Mode::WeightedSum &&
      !(config.combiner.alpha >= 0.0 && config.combiner.alpha <= 1.0)) {
    throw ParameterError("combiner alpha must lie in [0, 1]");
  }
}

FrameLayout init_uniform(std::size_t signal_length, std::size_t frames, int support_n,
                         WindowKind window) {
  if (frames == 0) throw ParameterError("at least one frame is required");
  if (support_n < 2) throw ParameterError("support N must be >= 2");
  if (frames > signal_length) throw ParameterError("more frames than samples");
  if (static_cast<std::size_t>(support_n) > signal_length) {
    throw ParameterError("support N exceeds the signal length");
  }
  FrameLayout layout;
  layout.support_n = support_n;
  layout.window = window;
  layout.lengths.assign(frames, static_cast<double>(support_n));
  layout.positions.resize(frames);
  const double m = static_cast<double>(signal_length);
  const double t_count = static_cast<double>(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const double center = (static_cast<double>(i) + 0.5) * m / t_count;
    layout.positions[i] = center - 0.5 * static_cast<double>(support_n);
  }
  return layout;
}

void project(FrameLayout& layout, std::size_t signal_length, double lambda_min) {
  const std::size_t frames = layout.frames();
  const double n = static_cast<double>(layout.support_n);
  for (double& lambda : layout.lengths) lambda = std::clamp(lambda, lambda_min, n);

  auto& t = layout.positions;
  if (!std::is_sorted(t.begin(), t.end())) {
    std::vector<std::size_t> order(frames);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
    std::vector<double> sorted_t(frames);
    std::vector<double> sorted_l(frames);
    for (std::size_t i = 0; i < frames; ++i) {
      sorted_t[i] = t[order[i]];
      sorted_l[i] = layout.lengths[order[i]];
    }
    t = std::move(sorted_t);
    layout.lengths = std::move(sorted_l);
  }

  const double lower = -0.5 * n;
  const double upper = static_cast<double>(signal_length) - kMinHop;
  t.front() = std::max(t.front(), lower);
  for (std::size_t i = 1; i < frames; ++i) t[i] = std::max(t[i], t[i - 1] + kMinHop);
  t.back() = std::min(t.back(), upper);
  for (std::size_t i = frames - 1; i-- > 0;) t[i] = std::min(t[i], t[i + 1] - kMinHop);
}

StepResult step(const Signal& signal, const FrameLayout& layout, const OptimizerConfig& config) {
  const ObjectiveEvaluation eval = evaluate_objectives(signal, layout, config.combiner);
  if (!std::isfinite(eval.value.kurtosis) || !std::isfinite(eval.value.coverage)) {
    throw OptimizerError("non-finite objective value");
  }
  require_finite(eval.kurtosis_grad, "kurtosis");
  require_finite(eval.coverage_grad, "coverage");
  GradientSet direction = combine_objectives(eval.kurtosis_grad, eval.coverage_grad, config.combiner);
  require_finite(direction, "combined");

  StepResult out{layout, eval.value, direction};
  FrameLayout& next = out.layout;
  const std::size_t frames = layout.frames();

  if (config.share_parameters) {
    // t_i = origin + i * hop: chain rule onto (origin, hop, lambda), averaged over frames.
    double d_origin = 0.0;
    double d_hop = 0.0;
    double d_lambda = 0.0;
    for (std::size_t i = 0; i < frames; ++i) {
      d_origin += direction.d_t[i];
      d_hop += static_cast<double>(i) * direction.d_t[i];
      d_lambda += direction.d_lambda[i];
    }
    const double inv = 1.0 / static_cast<double>(frames);
    d_origin *= inv;
    d_hop *= inv;
    d_lambda *= inv;
    for (std::size_t i = 0; i < frames; ++i) {
      next.positions[i] += config.lr_position * (d_origin + static_cast<double>(i) * d_hop);
      next.lengths[i] += config.lr_length * d_lambda;
    }
    project_shared(next, signal.size(), config.lambda_min);
  } else {
    for (std::size_t i = 0; i < frames; ++i) {
      next.positions[i] += config.lr_position * direction.d_t[i];
      next.lengths[i] += config.lr_length * direction.d_lambda[i];
    }
    project(next, signal.size(), config.lambda_min);
  }
  return out;
}

RunResult run_from(const Signal& signal, const OptimizerConfig& config, FrameLayout initial) {
  validate(config);
  validate(signal);
  validate(initial, signal.size());
  if (config.lambda_min > static_cast<double>(initial.support_n)) {
    throw ParameterError("lambda_min exceeds the support N");
  }

  RunResult result{std::move(initial), {}};
  double previous = 0.0;
  int quiet = 0;
  for (int iter = 0;; ++iter) {
    StepResult s = step(signal, result.layout, config);
    result.trace.records.push_back({iter, result.layout, s.objective, inf_norm(s.direction.d_t),
                                    inf_norm(s.direction.d_lambda)});
    if (iter > 0) {
      const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
      const double change = std::abs(s.objective.combined - previous) / scale;
      quiet = change < config.tolerance ? quiet + 1 : 0;
    }
    previous = s.objective.combined;
    if (iter >= config.max_iters || quiet >= kConvergenceWindow) break;
    result.layout = std::move(s.layout);
  }
  return result;
}

RunResult run(const Signal& signal, const OptimizerConfig& config, std::size_t frames,
              int support_n, WindowKind window) {
  return run_from(signal, config, init_uniform(signal.size(), frames, support_n, window));
}

}  // namespace dstft
