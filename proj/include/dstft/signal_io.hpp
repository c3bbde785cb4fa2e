#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "dstft/optimizer.hpp"
#include "dstft/types.hpp"

namespace dstft {

struct SegmentSpec {
  double frequency = 0.0;  // Hz
  double duration = 0.0;   // seconds
  double amplitude = 1.0;
};

/// Concatenates sinusoidal segments, each round(duration * fs) samples long.
/// With `phase_continuous` each segment starts at the phase the previous one
/// ended on; otherwise every segment starts at phase 0. Uniform noise in
/// [-noise, noise] is drawn from a 64-bit Mersenne Twister seeded with `seed`.
Signal generate_piecewise_sine(std::span<const SegmentSpec> segments, double sample_rate,
                               bool phase_continuous, double noise_amplitude,
                               std::uint64_t seed = 0);

/// Three-tone test signal used by the adaptation regression: 50/120/80 Hz for
/// 1.4/0.75/1.946 s at 1 kHz (M = 4096, changes at samples 1400 and 2150),
/// phase continuous, noise amplitude 0.01, seed 0.
Signal reference_signal();
std::vector<SegmentSpec> reference_segments();

enum class SignalFormat { WavPcm16Mono, CsvFloat };
enum class SpectrogramFormat { CsvMagnitude, PgmLogMagnitude };

/// `.wav` selects WavPcm16Mono, anything else CsvFloat.
SignalFormat signal_format_for(const std::filesystem::path& path);

Signal read_signal(const std::filesystem::path& path, SignalFormat format);
Signal parse_csv_signal(std::string_view text);
Signal parse_wav_pcm16(std::span<const std::uint8_t> bytes);

/// `# sample_rate=<fs>` followed by one sample per line (17 significant digits).
void write_signal_csv(const Signal& signal, const std::filesystem::path& path);

void write_spectrogram(const ComplexSpectrogram& spec, const FrameLayout& layout,
                       const std::filesystem::path& path, SpectrogramFormat format);

/// P5 log-magnitude image: width T, height F, row 0 is the highest bin.
std::vector<std::uint8_t> encode_pgm_logmag(const ComplexSpectrogram& spec);
std::string encode_csv_magnitude(const ComplexSpectrogram& spec, const FrameLayout& layout);

/// `iter,frame,t,lambda,K,C,combined`, one row per (iteration, frame).
void write_trace(const OptimizationTrace& trace, const std::filesystem::path& path);
std::string encode_trace(const OptimizationTrace& trace);

/// `frame,t,lambda`, one row per frame.
void write_layout(const FrameLayout& layout, const std::filesystem::path& path);
std::string encode_layout(const FrameLayout& layout);

}  // namespace dstft
