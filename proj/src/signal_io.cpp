#include "dstft/signal_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "dstft/errors.hpp"

namespace dstft {

namespace {

constexpr double kLogFloor = 1e-12;

std::string format_real(double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

// Writes to a sibling temporary file and renames it into place, so a failed
// write never leaves a partial file at `path`.
void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed writing '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot move output into '" + path.string() + "'");
  }
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 | static_cast<std::uint32_t>(b[at + 3]) << 24;
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Signal generate_piecewise_sine(std::span<const SegmentSpec> segments, double sample_rate,
                               bool phase_continuous, double noise_amplitude, std::uint64_t seed) {
  if (segments.empty()) throw ParameterError("at least one segment is required");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw ParameterError("sample rate must be positive");
  }
  if (!(noise_amplitude >= 0.0)) throw ParameterError("noise amplitude must be non-negative");

  Signal signal;
  signal.sample_rate = sample_rate;
  double phase = 0.0;
  for (const SegmentSpec& seg : segments) {
    if (!(seg.frequency >= 0.0) || seg.frequency >= 0.5 * sample_rate) {
      throw ParameterError("segment frequency " + format_real(seg.frequency) +
                           " Hz must lie in [0, fs/2)");
    }
    if (!(seg.duration > 0.0)) throw ParameterError("segment duration must be positive");
    const auto count = static_cast<std::size_t>(std::llround(seg.duration * sample_rate));
    const double omega = 2.0 * std::numbers::pi * seg.frequency / sample_rate;
    const double start = phase_continuous ? phase : 0.0;
    for (std::size_t n = 0; n < count; ++n) {
      signal.samples.push_back(seg.amplitude * std::sin(start + omega * static_cast<double>(n)));
    }
    phase = std::fmod(start + omega * static_cast<double>(count), 2.0 * std::numbers::pi);
  }
  if (noise_amplitude > 0.0) {
    std::mt19937_64 rng(seed);
    for (double& s : signal.samples) {
      // 53 random mantissa bits mapped to [-1, 1)
      const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      s += noise_amplitude * (2.0 * unit - 1.0);
    }
  }
  if (signal.samples.empty()) throw ParameterError("segments produce an empty signal");
  return signal;
}

std::vector<SegmentSpec> reference_segments() {
  return {{50.0, 1.4, 1.0}, {120.0, 0.75, 1.0}, {80.0, 1.946, 1.0}};
}

Signal reference_signal() {
  const auto segments = reference_segments();
  return generate_piecewise_sine(segments, 1000.0, true, 0.01, 0);
}

SignalFormat signal_format_for(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".wav" ? SignalFormat::WavPcm16Mono : SignalFormat::CsvFloat;
}

Signal parse_csv_signal(std::string_view text) {
  Signal signal;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "sample_rate=";
      const std::string_view body = trim(line.substr(1));
      if (body.starts_with(key)) {
        double fs = 0.0;
        if (!parse_double(trim(body.substr(key.size())), fs) || !(fs > 0.0)) {
          throw ParseError("line " + std::to_string(line_no) + ": malformed sample_rate header");
        }
        signal.sample_rate = fs;
      }
      continue;
    }
    double value = 0.0;
    if (!parse_double(line, value) || !std::isfinite(value)) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed float '" +
                       std::string(line) + "'");
    }
    signal.samples.push_back(value);
  }
  if (signal.samples.empty()) throw ParseError("empty signal");
  return signal;
}

Signal parse_wav_pcm16(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw ParseError("empty signal");
  if (bytes.size() < 12 || std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) != "RIFF" ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()) + 8, 4) != "WAVE") {
    throw ParseError("byte 0: not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  double sample_rate = 0.0;
  std::size_t at = 12;
  while (at + 8 <= bytes.size()) {
    const std::string_view id(reinterpret_cast<const char*>(bytes.data()) + at, 4);
    const std::size_t size = read_u32(bytes, at + 4);
    const std::size_t body = at + 8;
    if (body + size > bytes.size()) {
      throw ParseError("byte " + std::to_string(at) + ": chunk '" + std::string(id) +
                       "' runs past end of file");
    }
    if (id == "fmt ") {
      if (size < 16) throw ParseError("byte " + std::to_string(at) + ": fmt chunk too short");
      const std::uint16_t encoding = read_u16(bytes, body);
      const std::uint16_t channels = read_u16(bytes, body + 2);
      const std::uint16_t bits = read_u16(bytes, body + 14);
      if (encoding != 1) {
        throw ParseError("byte " + std::to_string(body) + ": unsupported encoding " +
                         std::to_string(encoding) + " (only PCM is supported)");
      }
      if (channels != 1) {
        throw ParseError("byte " + std::to_string(body + 2) + ": " + std::to_string(channels) +
                         " channels, only mono is supported");
      }
      if (bits != 16) {
        throw ParseError("byte " + std::to_string(body + 14) + ": " + std::to_string(bits) +
                         "-bit samples, only 16-bit PCM is supported");
      }
      sample_rate = static_cast<double>(read_u32(bytes, body + 4));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw ParseError("byte " + std::to_string(at) + ": data chunk before fmt");
      if (size < 2) throw ParseError("empty signal");
      Signal signal;
      signal.sample_rate = sample_rate > 0.0 ? sample_rate : 1.0;
      signal.samples.reserve(size / 2);
      for (std::size_t k = 0; k + 1 < size; k += 2) {
        const auto raw = static_cast<std::int16_t>(read_u16(bytes, body + k));
        signal.samples.push_back(static_cast<double>(raw) / 32768.0);
      }
      return signal;
    }
    at = body + size + (size & 1u);
  }
  throw ParseError("byte " + std::to_string(at) + ": no data chunk found");
}

Signal read_signal(const std::filesystem::path& path, SignalFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (format == SignalFormat::CsvFloat) return parse_csv_signal(bytes);
  return parse_wav_pcm16(
      std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

void write_signal_csv(const Signal& signal, const std::filesystem::path& path) {
  std::string out = "# sample_rate=" + format_real(signal.sample_rate) + "\n";
  for (double s : signal.samples) {
    out += format_real(s);
    out += '\n';
  }
  write_file(path, out);
}

std::string encode_csv_magnitude(const ComplexSpectrogram& spec, const FrameLayout& layout) {
  std::string out = "# N=" + std::to_string(layout.support_n) +
                    " T=" + std::to_string(spec.frames()) + "\n";
  for (std::size_t f = 0; f < spec.bins(); ++f) {
    for (std::size_t i = 0; i < spec.frames(); ++i) {
      if (i > 0) out += ',';
      out += format_real(std::abs(spec(i, f)));
    }
    out += '\n';
  }
  return out;
}

std::vector<std::uint8_t> encode_pgm_logmag(const ComplexSpectrogram& spec) {
  const std::size_t width = spec.frames();
  const std::size_t height = spec.bins();
  const std::string header =
      "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());

  std::vector<double> level(width * height);
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t k = 0; k < level.size(); ++k) {
    const std::size_t i = k / height;
    const std::size_t f = k % height;
    level[k] = std::log10(std::abs(spec(i, f)) + kLogFloor);
    lo = k == 0 ? level[k] : std::min(lo, level[k]);
    hi = k == 0 ? level[k] : std::max(hi, level[k]);
  }
  const double range = hi - lo;
  for (std::size_t row = 0; row < height; ++row) {
    const std::size_t f = height - 1 - row;
    for (std::size_t i = 0; i < width; ++i) {
      std::uint8_t pixel = 0;
      if (range > 0.0) {
        pixel = static_cast<std::uint8_t>(std::lround(255.0 * (level[i * height + f] - lo) / range));
      }
      out.push_back(pixel);
    }
  }
  return out;
}

void write_spectrogram(const ComplexSpectrogram& spec, const FrameLayout& layout,
                       const std::filesystem::path& path, SpectrogramFormat format) {
  if (format == SpectrogramFormat::CsvMagnitude) {
    write_file(path, encode_csv_magnitude(spec, layout));
    return;
  }
  const std::vector<std::uint8_t> bytes = encode_pgm_logmag(spec);
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string encode_trace(const OptimizationTrace& trace) {
  std::string out = "iter,frame,t,lambda,K,C,combined\n";
  for (const TraceRecord& rec : trace.records) {
    const std::string objectives = format_real(rec.objective.kurtosis) + "," +
                                   format_real(rec.objective.coverage) + "," +
                                   format_real(rec.objective.combined);
    for (std::size_t i = 0; i < rec.layout.frames(); ++i) {
      out += std::to_string(rec.iteration) + "," + std::to_string(i) + "," +
             format_real(rec.layout.positions[i]) + "," + format_real(rec.layout.lengths[i]) +
             "," + objectives + "\n";
    }
  }
  return out;
}

void write_trace(const OptimizationTrace& trace, const std::filesystem::path& path) {
  write_file(path, encode_trace(trace));
}

std::string encode_layout(const FrameLayout& layout) {
  std::string out = "frame,t,lambda\n";
  for (std::size_t i = 0; i < layout.frames(); ++i) {
    out += std::to_string(i) + "," + format_real(layout.positions[i]) + "," +
           format_real(layout.lengths[i]) + "\n";
  }
  return out;
}

void write_layout(const FrameLayout& layout, const std::filesystem::path& path) {
  write_file(path, encode_layout(layout));
}

}  // namespace dstft
