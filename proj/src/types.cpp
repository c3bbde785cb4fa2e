#include "dstft/types.hpp"

#include <cmath>
#include <string>

#include "dstft/errors.hpp"

namespace dstft {

void validate(const Signal& signal) {
  if (signal.samples.empty()) throw ParameterError("empty signal");
  if (!(signal.sample_rate > 0.0) || !std::isfinite(signal.sample_rate)) {
    throw ParameterError("sample rate must be positive and finite");
  }
  for (std::size_t n = 0; n < signal.samples.size(); ++n) {
    if (!std::isfinite(signal.samples[n])) {
      throw ParameterError("non-finite sample at index " + std::to_string(n));
    }
  }
}

void validate(const FrameLayout& layout, std::size_t signal_length) {
  if (layout.support_n < 2) throw ParameterError("support N must be >= 2");
  const std::size_t frames = layout.positions.size();
  if (frames == 0) throw ParameterError("layout must contain at least one frame");
  if (layout.lengths.size() != frames) {
    throw ParameterError("layout positions and lengths differ in size");
  }
  const double n = static_cast<double>(layout.support_n);
  const double m = static_cast<double>(signal_length);
  for (std::size_t i = 0; i < frames; ++i) {
    const double t = layout.positions[i];
    const double lambda = layout.lengths[i];
    if (!std::isfinite(t) || t < -n || t >= m) {
      throw ParameterError("frame " + std::to_string(i) + ": position " + std::to_string(t) +
                           " outside [-N, M)");
    }
    if (!(lambda > 0.0) || lambda > n) {
      throw ParameterError("frame " + std::to_string(i) + ": window length " +
                           std::to_string(lambda) + " outside (0, N]");
    }
    if (i > 0 && !(t > layout.positions[i - 1])) {
      throw ParameterError("frame positions must be strictly increasing (frame " +
                           std::to_string(i) + ")");
    }
  }
}

}  // namespace dstft
