#include "dstft/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "dstft/errors.hpp"
#include "dstft/transform.hpp"

namespace dstft {

namespace {

// d/dx of min(x, y) (and the matching derivative w.r.t. y). Ties split evenly.
struct Selection {
  double first;
  double second;
};

Selection min_select(double x, double y) {
  if (x < y) return {1.0, 0.0};
  if (x > y) return {0.0, 1.0};
  return {0.5, 0.5};
}

Selection max_select(double x, double y) {
  if (x > y) return {1.0, 0.0};
  if (x < y) return {0.0, 1.0};
  return {0.5, 0.5};
}

// Partial derivatives of a quantity w.r.t. one frame's (t, lambda).
struct Partial {
  double t = 0.0;
  double lambda = 0.0;
};

Partial scale(Partial p, double s) { return {p.t * s, p.lambda * s}; }
Partial operator-(Partial a, Partial b) { return {a.t - b.t, a.lambda - b.lambda}; }

void check_shapes(const GradientSet& a, const GradientSet& b) {
  if (a.d_t.size() != b.d_t.size() || a.d_lambda.size() != b.d_lambda.size() ||
      a.d_t.size() != a.d_lambda.size()) {
    throw ParameterError("gradient sets differ in shape");
  }
}

}  // namespace

std::vector<double> frame_weights(const FrameLayout& layout) {
  const std::size_t frames = layout.frames();
  const auto& t = layout.positions;
  if (frames <= 1) return std::vector<double>(frames, 1.0);
  std::vector<double> w(frames);
  w.front() = t[1] - t[0];
  w.back() = t[frames - 1] - t[frames - 2];
  for (std::size_t i = 1; i + 1 < frames; ++i) w[i] = 0.5 * (t[i + 1] - t[i - 1]);
  return w;
}

double frame_kurtosis(std::span<const Complex> frame) {
  double second = 0.0;
  double fourth = 0.0;
  for (const Complex& s : frame) {
    const double power = std::norm(s);
    second += power;
    fourth += power * power;
  }
  const double bins = static_cast<double>(frame.size());
  if (frame.empty() || second / bins < kSilentFramePower) return 1.0;
  return bins * fourth / (second * second);
}

double kurtosis_objective(const ComplexSpectrogram& spec, const FrameLayout& layout) {
  if (spec.frames() != layout.frames()) {
    throw ParameterError("spectrogram frame count does not match layout");
  }
  const std::vector<double> w = frame_weights(layout);
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < spec.frames(); ++i) {
    weighted += w[i] * frame_kurtosis(spec.row(i));
    total += w[i];
  }
  return weighted / total;
}

double coverage_with_gradient(const FrameLayout& layout, std::size_t signal_length,
                              GradientSet* grad) {
  const std::size_t frames = layout.frames();
  const double n = static_cast<double>(layout.support_n);
  const double m = static_cast<double>(signal_length);

  // Window i spans [a_i, e_i] with a_i = t_i + (N - lambda_i)/2.
  std::vector<double> start(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    start[i] = layout.positions[i] + 0.5 * (n - layout.lengths[i]);
  }

  // Per-term partials w.r.t. own frame and (for the hop) the next frame.
  std::vector<Partial> own(frames);
  std::vector<Partial> next(frames);
  double sum = 0.0;
  for (std::size_t i = 0; i < frames; ++i) {
    const double a = start[i];
    const double e = a + layout.lengths[i];
    const Partial da{1.0, -0.5};
    const Partial de{1.0, 0.5};

    const Selection lo_sel = max_select(a, 0.0);
    const Selection hi_sel = min_select(e, m);
    const double lo = std::max(a, 0.0);
    const double hi = std::min(e, m);
    const Partial d_lo = scale(da, lo_sel.first);
    const Partial d_hi = scale(de, hi_sel.first);

    const Selection len_sel = max_select(hi - lo, 0.0);
    const double eff = std::max(hi - lo, 0.0);
    const Partial d_eff = scale(d_hi - d_lo, len_sel.first);

    if (i + 1 == frames) {
      sum += eff;
      own[i] = d_eff;
      continue;
    }
    // H~_{i+1} = a_{i+1} - a_i
    const double hop = start[i + 1] - a;
    const Selection term_sel = min_select(eff, hop);
    sum += std::min(eff, hop);
    own[i] = {d_eff.t * term_sel.first - term_sel.second,
              d_eff.lambda * term_sel.first + 0.5 * term_sel.second};
    next[i] = {term_sel.second, -0.5 * term_sel.second};
  }

  const double raw = sum / m;
  const double coverage = std::clamp(raw, 0.0, 1.0);
  if (grad != nullptr) {
    *grad = GradientSet(frames);
    // clamp(raw, 0, 1) = min(max(raw, 0), 1)
    const double pass = max_select(raw, 0.0).first * min_select(std::max(raw, 0.0), 1.0).first;
    const double factor = pass / m;
    for (std::size_t i = 0; i < frames; ++i) {
      grad->d_t[i] += factor * own[i].t;
      grad->d_lambda[i] += factor * own[i].lambda;
      if (i + 1 < frames) {
        grad->d_t[i + 1] += factor * next[i].t;
        grad->d_lambda[i + 1] += factor * next[i].lambda;
      }
    }
  }
  return coverage;
}

double coverage_objective(const FrameLayout& layout, std::size_t signal_length) {
  return coverage_with_gradient(layout, signal_length, nullptr);
}

ObjectiveEvaluation evaluate_objectives(const Signal& signal, const FrameLayout& layout,
                                        const Combiner& combiner) {
  const ComplexSpectrogram spec = dstft_forward(signal, layout);
  const std::size_t frames = layout.frames();
  const std::size_t bins = spec.bins();
  const std::vector<double> w = frame_weights(layout);
  double total_weight = 0.0;
  for (double wi : w) total_weight += wi;

  std::vector<double> kurt(frames);
  double weighted = 0.0;
  for (std::size_t i = 0; i < frames; ++i) {
    kurt[i] = frame_kurtosis(spec.row(i));
    weighted += w[i] * kurt[i];
  }
  const double kurtosis = weighted / total_weight;

  // Cotangent dK/d conj(S) = (w_i / W) dk_i/dP_f S_f with P_f = |S_f|^2.
  ComplexSpectrogram cotangent(frames, bins);
  const double f_count = static_cast<double>(bins);
  for (std::size_t i = 0; i < frames; ++i) {
    const auto row = spec.row(i);
    double second = 0.0;
    double fourth = 0.0;
    for (const Complex& s : row) {
      const double power = std::norm(s);
      second += power;
      fourth += power * power;
    }
    if (second / f_count < kSilentFramePower) continue;
    const double outer = w[i] / total_weight;
    const double inv_b2 = 1.0 / (second * second);
    const double inv_b3 = inv_b2 / second;
    for (std::size_t f = 0; f < bins; ++f) {
      const double dk_dp = f_count * (2.0 * std::norm(row[f]) * inv_b2 - 2.0 * fourth * inv_b3);
      cotangent(i, f) = outer * dk_dp * row[f];
    }
  }

  ObjectiveEvaluation out;
  out.kurtosis_grad = dstft_backward(signal, layout, cotangent);

  // dK/dw_j = (k_j - K) / W, chained through the position differences.
  if (frames >= 2) {
    auto& d_t = out.kurtosis_grad.d_t;
    for (std::size_t j = 0; j < frames; ++j) {
      const double q = (kurt[j] - kurtosis) / total_weight;
      if (j == 0) {
        d_t[1] += q;
        d_t[0] -= q;
      } else if (j + 1 == frames) {
        d_t[j] += q;
        d_t[j - 1] -= q;
      } else {
        d_t[j + 1] += 0.5 * q;
        d_t[j - 1] -= 0.5 * q;
      }
    }
  }

  const double coverage = coverage_with_gradient(layout, signal.size(), &out.coverage_grad);
  out.value = {kurtosis, coverage, combiner.combine_values(kurtosis, coverage)};
  return out;
}

std::pair<GradientSet, GradientSet> objective_gradients(const Signal& signal,
                                                        const FrameLayout& layout) {
  ObjectiveEvaluation eval = evaluate_objectives(signal, layout);
  return {std::move(eval.kurtosis_grad), std::move(eval.coverage_grad)};
}

double min_norm_coefficient(const GradientSet& g1, const GradientSet& g2) {
  check_shapes(g1, g2);
  double diff_sq = 0.0;
  double numer = 0.0;
  for (std::size_t i = 0; i < g1.d_t.size(); ++i) {
    const double dt = g2.d_t[i] - g1.d_t[i];
    const double dl = g2.d_lambda[i] - g1.d_lambda[i];
    diff_sq += dt * dt + dl * dl;
    numer += dt * g2.d_t[i] + dl * g2.d_lambda[i];
  }
  if (std::sqrt(diff_sq) < 1e-12) return 1.0;
  return std::clamp(numer / diff_sq, 0.0, 1.0);
}

GradientSet combine_objectives(const GradientSet& grad_kurtosis, const GradientSet& grad_coverage,
                               const Combiner& combiner) {
  check_shapes(grad_kurtosis, grad_coverage);
  const double gamma = combiner.mode == Combiner::Mode::WeightedSum
                           ? combiner.alpha
                           : min_norm_coefficient(grad_kurtosis, grad_coverage);
  const double rest = combiner.mode == Combiner::Mode::WeightedSum ? 1.0 - combiner.alpha
                                                                   : 1.0 - gamma;
  GradientSet out(grad_kurtosis.frames());
  for (std::size_t i = 0; i < out.frames(); ++i) {
    out.d_t[i] = gamma * grad_kurtosis.d_t[i] + rest * grad_coverage.d_t[i];
    out.d_lambda[i] = gamma * grad_kurtosis.d_lambda[i] + rest * grad_coverage.d_lambda[i];
  }
  return out;
}

}  // namespace dstft
