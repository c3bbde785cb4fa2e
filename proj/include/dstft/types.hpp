#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dstft/window.hpp"

namespace dstft {

using Complex = std::complex<double>;

/// Real-valued sample sequence. The sample rate is metadata only.
struct Signal {
  std::vector<double> samples;
  double sample_rate = 1.0;

  std::size_t size() const noexcept { return samples.size(); }
  /// Zero-padded read: indices outside [0, M) return 0.
  double at_padded(long long index) const noexcept {
    return (index >= 0 && static_cast<std::size_t>(index) < samples.size())
               ? samples[static_cast<std::size_t>(index)]
               : 0.0;
  }
};

/// Throws ParameterError if the signal is empty or holds non-finite samples.
void validate(const Signal& signal);

/// Per-frame continuous positions and window lengths over a shared support.
struct FrameLayout {
  int support_n = 0;
  std::vector<double> positions;  // t_i, samples
  std::vector<double> lengths;    // lambda_i, samples
  WindowKind window = WindowKind::Hann;

  std::size_t frames() const noexcept { return positions.size(); }
};

/// Checks T >= 1, equal sizes, strictly increasing positions, lambda in (0, N]
/// and t_i in [-N, M). Throws ParameterError naming the first violation.
void validate(const FrameLayout& layout, std::size_t signal_length);

/// Row-major T x F matrix of complex spectrum values; F equals the support N.
class ComplexSpectrogram {
 public:
  ComplexSpectrogram() = default;
  ComplexSpectrogram(std::size_t frames, std::size_t bins)
      : frames_(frames), bins_(bins), data_(frames * bins) {}

  std::size_t frames() const noexcept { return frames_; }
  std::size_t bins() const noexcept { return bins_; }

  Complex& operator()(std::size_t frame, std::size_t bin) { return data_[frame * bins_ + bin]; }
  const Complex& operator()(std::size_t frame, std::size_t bin) const {
    return data_[frame * bins_ + bin];
  }

  std::span<Complex> row(std::size_t frame) { return {data_.data() + frame * bins_, bins_}; }
  std::span<const Complex> row(std::size_t frame) const {
    return {data_.data() + frame * bins_, bins_};
  }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<Complex> data_;
};

/// Per-frame partials of a real scalar loss w.r.t. t_i and lambda_i.
struct GradientSet {
  std::vector<double> d_t;
  std::vector<double> d_lambda;

  GradientSet() = default;
  explicit GradientSet(std::size_t frames) : d_t(frames, 0.0), d_lambda(frames, 0.0) {}

  std::size_t frames() const noexcept { return d_t.size(); }
};

}  // namespace dstft
