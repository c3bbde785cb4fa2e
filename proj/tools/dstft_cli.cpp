// dstft: command-line front end for the fractional-position STFT.
//
// Exit codes: 0 success, 1 runtime/IO/validation failure, 2 usage error.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dstft/errors.hpp"
#include "dstft/gradcheck.hpp"
#include "dstft/objectives.hpp"
#include "dstft/optimizer.hpp"
#include "dstft/signal_io.hpp"
#include "dstft/transform.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void print_banner(const CLI::App& cmd) {
  std::ostringstream out;
  out << "# dstft " << kVersion << " command=" << cmd.get_name();
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->get_name() == "--help") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
      if (opt->get_expected_max() == 0) value = "true";
    } else {
      value = opt->get_default_str();
      if (opt->get_expected_max() == 0) value = "false";
    }
    out << " " << opt->get_name().substr(2) << "=" << (value.empty() ? "-" : value);
  }
  out << " omp_threads=" << dstft::thread_count() << "\n";
  std::cerr << out.str();
}

std::vector<dstft::SegmentSpec> parse_segments(const std::string& text) {
  std::vector<dstft::SegmentSpec> segments;
  std::stringstream list(text);
  std::string item;
  while (std::getline(list, item, ',')) {
    if (item.empty()) continue;
    dstft::SegmentSpec seg;
    char c1 = 0;
    char c2 = 0;
    std::istringstream in(item);
    if (!(in >> seg.frequency >> c1 >> seg.duration >> c2 >> seg.amplitude) || c1 != ':' ||
        c2 != ':' || !(in >> std::ws).eof()) {
      throw UsageError("malformed segment '" + item + "' (expected freq:duration:amplitude)");
    }
    segments.push_back(seg);
  }
  if (segments.empty()) throw UsageError("--segments must list at least one segment");
  return segments;
}

dstft::Combiner parse_combiner(const std::string& text) {
  dstft::Combiner combiner;
  if (text == "minnorm") {
    combiner.mode = dstft::Combiner::Mode::MinNorm;
    return combiner;
  }
  constexpr std::string_view prefix = "weighted:";
  if (text.rfind(prefix, 0) == 0) {
    combiner.mode = dstft::Combiner::Mode::WeightedSum;
    try {
      std::size_t used = 0;
      const std::string rest = text.substr(prefix.size());
      combiner.alpha = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("malformed combiner '" + text + "'");
    }
    if (!(combiner.alpha >= 0.0 && combiner.alpha <= 1.0)) {
      throw UsageError("combiner weight must lie in [0, 1]");
    }
    return combiner;
  }
  throw UsageError("unknown combiner '" + text + "' (expected minnorm or weighted:<alpha>)");
}

dstft::WindowKind parse_window(const std::string& text) {
  try {
    return dstft::parse_window_kind(text);
  } catch (const dstft::ParameterError& e) {
    throw UsageError(e.what());
  }
}

dstft::Signal load_signal(const std::string& path) {
  return dstft::read_signal(path, dstft::signal_format_for(path));
}

void write_outputs(const dstft::ComplexSpectrogram& spec, const dstft::FrameLayout& layout,
                   const std::string& csv_path, const std::string& img_path) {
  if (!csv_path.empty()) {
    dstft::write_spectrogram(spec, layout, csv_path, dstft::SpectrogramFormat::CsvMagnitude);
  }
  if (!img_path.empty()) {
    dstft::write_spectrogram(spec, layout, img_path, dstft::SpectrogramFormat::PgmLogMagnitude);
  }
}

struct GenArgs {
  std::string segments;
  double fs = 1000.0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  bool phase_reset = false;
  std::string out = "signal.csv";
};

int cmd_gen(const GenArgs& a) {
  const auto segments = parse_segments(a.segments);
  dstft::Signal signal;
  try {
    signal = dstft::generate_piecewise_sine(segments, a.fs, !a.phase_reset, a.noise, a.seed);
  } catch (const dstft::ParameterError& e) {
    throw UsageError(e.what());
  }
  dstft::write_signal_csv(signal, a.out);
  std::cout << "M=" << signal.size() << " duration=" << fmt(signal.size() / a.fs) << " s\n";
  return 0;
}

struct StftArgs {
  std::string in;
  int support = 256;
  int hop = 128;
  std::string window = "hann";
  std::string out_spec;
  std::string out_img;
};

int cmd_stft(const StftArgs& a) {
  if (a.hop <= 0) throw UsageError("--hop must be a positive number of samples");
  if (a.support < 2) throw UsageError("--support must be >= 2");
  const dstft::WindowKind window = parse_window(a.window);
  const dstft::Signal signal = load_signal(a.in);
  const long long m = static_cast<long long>(signal.size());
  const long long frames = m >= a.support ? (m - a.support) / a.hop + 1 : 1;

  dstft::FrameLayout layout;
  layout.support_n = a.support;
  layout.window = window;
  for (long long i = 0; i < frames; ++i) {
    layout.positions.push_back(static_cast<double>(i * a.hop));
    layout.lengths.push_back(static_cast<double>(a.support));
  }
  const dstft::ComplexSpectrogram spec = dstft::dstft_forward(signal, layout);
  write_outputs(spec, layout, a.out_spec, a.out_img);
  std::cout << "M=" << m << " N=" << a.support << " hop=" << a.hop << " T=" << frames << "\n";
  return 0;
}

struct AdaptArgs {
  std::string in;
  int support = 256;
  int frames = 16;
  int iters = 500;
  double lr_pos = 0.1;
  double lr_len = 0.1;
  std::string combiner = "minnorm";
  bool share = false;
  double tol = 1e-12;
  double lambda_min = 2.0;
  std::string window = "hann";
  std::string out_spec;
  std::string out_img;
  std::string out_trace;
  std::string out_layout;
};

void print_objective(const char* label, const dstft::ObjectiveValue& v) {
  std::cout << label << " K=" << fmt(v.kurtosis) << " C=" << fmt(v.coverage)
            << " combined=" << fmt(v.combined) << "\n";
}

int cmd_adapt(const AdaptArgs& a) {
  if (a.frames < 1) throw UsageError("--frames must be >= 1");
  if (a.iters < 0) throw UsageError("--iters must be >= 0");
  if (a.support < 2) throw UsageError("--support must be >= 2");
  dstft::OptimizerConfig config;
  config.lr_position = a.lr_pos;
  config.lr_length = a.lr_len;
  config.max_iters = a.iters;
  config.tolerance = a.tol;
  config.combiner = parse_combiner(a.combiner);
  config.share_parameters = a.share;
  config.lambda_min = a.lambda_min;
  try {
    dstft::validate(config);
  } catch (const dstft::ParameterError& e) {
    throw UsageError(e.what());
  }
  if (config.lambda_min > a.support) throw UsageError("--lambda-min exceeds --support");
  const dstft::WindowKind window = parse_window(a.window);

  const dstft::Signal signal = load_signal(a.in);
  dstft::FrameLayout initial;
  try {
    initial = dstft::init_uniform(signal.size(), static_cast<std::size_t>(a.frames), a.support,
                                  window);
  } catch (const dstft::ParameterError& e) {
    throw UsageError(e.what());
  }

  const auto started = std::chrono::steady_clock::now();
  const dstft::RunResult result = dstft::run_from(signal, config, initial);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const dstft::ComplexSpectrogram spec = dstft::dstft_forward(signal, result.layout);
  write_outputs(spec, result.layout, a.out_spec, a.out_img);
  if (!a.out_trace.empty()) dstft::write_trace(result.trace, a.out_trace);
  if (!a.out_layout.empty()) dstft::write_layout(result.layout, a.out_layout);

  const auto& records = result.trace.records;
  print_objective("initial", records.front().objective);
  print_objective("final", records.back().objective);
  std::cout << "iterations=" << records.back().iteration << " seconds=" << fmt(seconds) << "\n";
  return 0;
}

struct GradcheckArgs {
  std::uint64_t seed = 0;
  int cases = 100;
  double step = 1e-4;
  double rtol = 1e-4;
};

int cmd_gradcheck(const GradcheckArgs& a) {
  if (a.cases < 0) throw UsageError("--cases must be >= 0");
  if (!(a.step > 0.0)) throw UsageError("--step must be positive");
  if (!(a.rtol >= 0.0)) throw UsageError("--rtol must be non-negative");
  if (a.cases == 0) std::cerr << "warning: --cases 0, nothing to check\n";
  const dstft::GradcheckReport report =
      dstft::run_gradcheck({a.seed, a.cases, a.step, a.rtol});
  std::cout << "cases=" << report.cases << " worst_rel_err_t=" << fmt(report.worst_t)
            << " worst_rel_err_lambda=" << fmt(report.worst_lambda) << " rtol=" << fmt(a.rtol)
            << "\n";
  if (!report.passed()) {
    std::cout << "FAIL: " << report.failing_seeds.size() << " instance(s) above rtol, seeds:";
    for (auto s : report.failing_seeds) std::cout << " " << s;
    std::cout << "\n";
    return kExitRuntime;
  }
  std::cout << "PASS\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional-position differentiable STFT: spectrograms, frame adaptation, "
               "gradient validation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  int threads = 0;

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a piecewise-sinusoid test signal (csv)");
  gen_cmd->add_option("--segments", gen.segments,
                      "Comma-separated freq:duration:amplitude triples (Hz:s:linear)")
      ->required();
  gen_cmd->add_option("--fs", gen.fs, "Sample rate (Hz)")->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise, "Uniform noise amplitude (linear)")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Noise seed (integer)")->capture_default_str();
  gen_cmd->add_flag("--phase-reset", gen.phase_reset,
                    "Restart every segment at phase 0 (default: phase continuous)");
  gen_cmd->add_option("--out", gen.out, "Output signal path (csv)")->capture_default_str();

  StftArgs stft;
  auto* stft_cmd = app.add_subcommand("stft", "Classical STFT on a uniform integer frame grid");
  stft_cmd->add_option("--in", stft.in, "Input signal (.wav PCM16 mono or csv)")->required();
  stft_cmd->add_option("--support", stft.support, "Window support / DFT size N (samples)")
      ->capture_default_str();
  stft_cmd->add_option("--hop", stft.hop, "Hop length (samples)")->capture_default_str();
  stft_cmd->add_option("--window", stft.window, "Tapering window: hann|gauss")
      ->capture_default_str();
  stft_cmd->add_option("--out-spec", stft.out_spec, "Magnitude CSV output path");
  stft_cmd->add_option("--out-img", stft.out_img, "Log-magnitude PGM output path");
  stft_cmd->add_option("--threads", threads, "Worker threads (count, 0 = all cores)")
      ->capture_default_str();

  AdaptArgs adapt;
  auto* adapt_cmd =
      app.add_subcommand("adapt", "Adapt frame positions and window lengths by gradient ascent");
  adapt_cmd->add_option("--in", adapt.in, "Input signal (.wav PCM16 mono or csv)")->required();
  adapt_cmd->add_option("--support", adapt.support, "Window support / DFT size N (samples)")
      ->capture_default_str();
  adapt_cmd->add_option("--frames", adapt.frames, "Number of frames T (count)")
      ->capture_default_str();
  adapt_cmd->add_option("--iters", adapt.iters, "Maximum ascent iterations (count)")
      ->capture_default_str();
  adapt_cmd->add_option("--lr-pos", adapt.lr_pos, "Position learning rate (samples per unit gradient)")
      ->capture_default_str();
  adapt_cmd->add_option("--lr-len", adapt.lr_len, "Length learning rate (samples per unit gradient)")
      ->capture_default_str();
  adapt_cmd->add_option("--combiner", adapt.combiner,
                        "Objective combiner: minnorm | weighted:<alpha in [0,1]>")
      ->capture_default_str();
  adapt_cmd->add_flag("--share", adapt.share, "Share one hop and one window length across frames");
  adapt_cmd->add_option("--tol", adapt.tol,
                        "Convergence tolerance (relative change of combined objective)")
      ->capture_default_str();
  adapt_cmd->add_option("--lambda-min", adapt.lambda_min, "Lower bound on window length (samples)")
      ->capture_default_str();
  adapt_cmd->add_option("--window", adapt.window, "Tapering window: hann|gauss")
      ->capture_default_str();
  adapt_cmd->add_option("--out-spec", adapt.out_spec, "Final magnitude CSV output path");
  adapt_cmd->add_option("--out-img", adapt.out_img, "Final log-magnitude PGM output path");
  adapt_cmd->add_option("--out-trace", adapt.out_trace, "Optimization trace CSV output path");
  adapt_cmd->add_option("--out-layout", adapt.out_layout, "Final layout CSV output path");
  adapt_cmd->add_option("--threads", threads, "Worker threads (count, 0 = all cores)")
      ->capture_default_str();

  GradcheckArgs grad;
  auto* grad_cmd = app.add_subcommand(
      "gradcheck", "Compare analytic transform gradients with central finite differences");
  grad_cmd->add_option("--seed", grad.seed, "First instance seed (integer)")->capture_default_str();
  grad_cmd->add_option("--cases", grad.cases, "Number of random instances (count)")
      ->capture_default_str();
  grad_cmd->add_option("--step", grad.step, "Finite-difference step (samples)")
      ->capture_default_str();
  grad_cmd->add_option("--rtol", grad.rtol, "Relative error threshold (dimensionless)")
      ->capture_default_str();
  grad_cmd->add_option("--threads", threads, "Worker threads (count, 0 = all cores)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (threads < 0) {
    std::cerr << "error: --threads must be >= 0\n";
    return kExitUsage;
  }
  dstft::set_thread_count(threads);

  CLI::App* cmd = app.get_subcommands().front();
  print_banner(*cmd);
  try {
    if (cmd == gen_cmd) return cmd_gen(gen);
    if (cmd == stft_cmd) return cmd_stft(stft);
    if (cmd == adapt_cmd) return cmd_adapt(adapt);
    return cmd_gradcheck(grad);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dstft::OptimizerError& e) {
    std::cerr << "optimizer aborted: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
