#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "dstft/errors.hpp"
#include "dstft/transform.hpp"
#include "test_util.hpp"

namespace dstft {
namespace {

constexpr double kPi = std::numbers::pi;

// Centered Hann written out independently of eval_window.
double hann(double u, int n, double lambda) {
  const double x = u - 0.5 * (n - 1);
  return std::abs(x) < 0.5 * lambda ? 0.5 * (1.0 + std::cos(2.0 * kPi * x / lambda)) : 0.0;
}

FrameLayout integer_layout(std::vector<double> positions, int n, WindowKind kind = WindowKind::Hann) {
  FrameLayout layout;
  layout.support_n = n;
  layout.window = kind;
  layout.lengths.assign(positions.size(), static_cast<double>(n));
  layout.positions = std::move(positions);
  return layout;
}

double bin_power(const Signal& s, const FrameLayout& layout, std::size_t frame, std::size_t bin) {
  return std::norm(reference::dstft_forward(s, layout)(frame, bin));
}

TEST(ClassicalStft, ZeroSignalGivesZeroMatrix) {
  Signal s{std::vector<double>(200, 0.0), 1.0};
  const std::vector<long long> starts{0, 50, 120};
  const auto spec = classical_stft(s, starts, 32, WindowKind::Hann, 32.0);
  for (const auto& v : spec.data()) EXPECT_EQ(v, Complex(0.0, 0.0));
}

TEST(ClassicalStft, DcBinOfConstantSignalIsWindowSum) {
  const int n = 32;
  Signal s{std::vector<double>(128, 1.0), 1.0};
  const std::vector<long long> starts{0, 40, 96};
  for (double lambda : {32.0, 20.5}) {
    double window_sum = 0.0;
    for (int k = 0; k < n; ++k) window_sum += hann(k, n, lambda);
    const auto spec = classical_stft(s, starts, n, WindowKind::Hann, lambda);
    for (std::size_t i = 0; i < starts.size(); ++i) {
      EXPECT_NEAR(spec(i, 0).real(), window_sum, 1e-12);
      EXPECT_NEAR(spec(i, 0).imag(), 0.0, 1e-12);
    }
  }
}

TEST(ClassicalStft, ImpulseGivesSingleTerm) {
  const int n = 16;
  const long long b = 10;
  const int k0 = 5;
  Signal s{std::vector<double>(64, 0.0), 1.0};
  s.samples[b + k0] = 1.0;
  const std::vector<long long> starts{b};
  const auto spec = classical_stft(s, starts, n, WindowKind::Hann, 12.0);
  for (int f = 0; f < n; ++f) {
    const Complex expected = hann(k0, n, 12.0) * std::polar(1.0, -2.0 * kPi * k0 * f / n);
    EXPECT_NEAR(std::abs(spec(0, f) - expected), 0.0, 1e-14);
  }
}

TEST(ClassicalStft, RejectsEmptyStarts) {
  Signal s{std::vector<double>(64, 1.0), 1.0};
  EXPECT_THROW(classical_stft(s, {}, 16, WindowKind::Hann, 16.0), ParameterError);
}

TEST(DstftForward, IntegerPositionsMatchClassical) {
  std::mt19937_64 rng(3);
  for (int n : {16, 64, 256}) {
    const Signal s = test::random_signal(rng, 700);
    const std::vector<long long> starts{-5, 0, 33, 200, 650};
    std::vector<double> positions(starts.begin(), starts.end());
    for (WindowKind kind : {WindowKind::Hann, WindowKind::Gaussian}) {
      const auto expected = classical_stft(s, starts, n, kind, n);
      const auto fast = dstft_forward(s, integer_layout(positions, n, kind));
      const auto direct = reference::dstft_forward(s, integer_layout(positions, n, kind));
      EXPECT_LE(test::normwise_error(fast, expected), 1e-12);
      EXPECT_LE(test::normwise_error(direct, expected), 1e-12);
    }
  }
}

TEST(DstftForward, ZeroSignalGivesZeroMatrix) {
  Signal s{std::vector<double>(100, 0.0), 1.0};
  FrameLayout layout = integer_layout({0.3, 20.7, 51.5}, 32);
  const auto spec = dstft_forward(s, layout);
  for (const auto& v : spec.data()) EXPECT_EQ(v, Complex(0.0, 0.0));
}

TEST(DstftForward, DcBinOfConstantSignalIsShiftedWindowSum) {
  const int n = 32;
  Signal s{std::vector<double>(200, 1.0), 1.0};
  for (double delta : {0.0, 0.1, 0.5, 0.77, 0.999}) {
    for (double lambda : {32.0, 31.6, 17.2}) {
      FrameLayout layout = integer_layout({40.0 + delta}, n);
      layout.lengths = {lambda};
      double expected = 0.0;
      for (int k = 0; k <= n; ++k) expected += hann(k - delta, n, lambda);
      const Complex got = dstft_forward(s, layout)(0, 0);
      EXPECT_NEAR(got.real(), expected, 1e-12) << "delta=" << delta << " lambda=" << lambda;
      EXPECT_NEAR(got.imag(), 0.0, 1e-12);
    }
  }
}

TEST(DstftForward, FactoredPhaseMatchesDirectSummation) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = trial % 2 == 0 ? 32 : 24;  // radix-2 and direct-DFT paths
    const Signal s = test::random_signal(rng, 300);
    const WindowKind kind = trial % 3 == 0 ? WindowKind::Gaussian : WindowKind::Hann;
    const FrameLayout layout = test::random_layout(rng, s.size(), n, 5, kind);
    EXPECT_LE(test::normwise_error(dstft_forward(s, layout), reference::dstft_forward(s, layout)),
              1e-12);
  }
}

TEST(DstftForward, ResultIndependentOfThreadCount) {
  std::mt19937_64 rng(8);
  const Signal s = test::random_signal(rng, 2000);
  const FrameLayout layout = test::random_layout(rng, s.size(), 128, 12, WindowKind::Hann);
  set_thread_count(1);
  const auto one = dstft_forward(s, layout);
  const auto grad_one = dstft_backward(s, layout, one);
  set_thread_count(4);
  const auto four = dstft_forward(s, layout);
  const auto grad_four = dstft_backward(s, layout, four);
  set_thread_count(0);
  for (std::size_t k = 0; k < one.data().size(); ++k) EXPECT_EQ(one.data()[k], four.data()[k]);
  EXPECT_EQ(grad_one.d_t, grad_four.d_t);
  EXPECT_EQ(grad_one.d_lambda, grad_four.d_lambda);
}

TEST(LayoutValidation, RejectsInfeasibleLayouts) {
  Signal s{std::vector<double>(100, 0.0), 1.0};
  EXPECT_THROW(dstft_forward(s, integer_layout({}, 16)), ParameterError);
  EXPECT_THROW(dstft_forward(s, integer_layout({5.0, 5.0}, 16)), ParameterError);
  EXPECT_THROW(dstft_forward(s, integer_layout({10.0, 4.0}, 16)), ParameterError);
  EXPECT_THROW(dstft_forward(s, integer_layout({-16.5}, 16)), ParameterError);
  EXPECT_THROW(dstft_forward(s, integer_layout({100.0}, 16)), ParameterError);
  EXPECT_NO_THROW(dstft_forward(s, integer_layout({-16.0, 99.5}, 16)));
  FrameLayout long_window = integer_layout({0.0}, 16);
  long_window.lengths = {16.01};
  EXPECT_THROW(dstft_forward(s, long_window), ParameterError);
  long_window.lengths = {0.0};
  EXPECT_THROW(dstft_forward(s, long_window), ParameterError);
  EXPECT_THROW(dstft_forward(Signal{}, integer_layout({0.0}, 16)), ParameterError);
}

TEST(DstftBackward, ZeroCotangentGivesZeroGradient) {
  std::mt19937_64 rng(1);
  const Signal s = test::random_signal(rng, 256);
  const FrameLayout layout = test::random_layout(rng, s.size(), 32, 4, WindowKind::Hann);
  const GradientSet g = dstft_backward(s, layout, ComplexSpectrogram(4, 32));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(g.d_t[i], 0.0);
    EXPECT_EQ(g.d_lambda[i], 0.0);
  }
}

TEST(DstftBackward, ZeroSignalGivesZeroGradient) {
  std::mt19937_64 rng(2);
  Signal s{std::vector<double>(256, 0.0), 1.0};
  const FrameLayout layout = test::random_layout(rng, s.size(), 32, 4, WindowKind::Hann);
  ComplexSpectrogram cot(4, 32);
  for (auto& c : cot.data()) c = {test::uniform(rng, -1, 1), test::uniform(rng, -1, 1)};
  const GradientSet g = dstft_backward(s, layout, cot);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(g.d_t[i], 0.0);
    EXPECT_EQ(g.d_lambda[i], 0.0);
  }
}

TEST(DstftBackward, RejectsShapeMismatch) {
  Signal s{std::vector<double>(64, 1.0), 1.0};
  const FrameLayout layout = integer_layout({0.0, 10.0}, 16);
  EXPECT_THROW(dstft_backward(s, layout, ComplexSpectrogram(3, 16)), ParameterError);
  EXPECT_THROW(dstft_backward(s, layout, ComplexSpectrogram(2, 8)), ParameterError);
}

// L = |S[i0, f0]|^2, cotangent = S at that bin.
struct SingleBinCheck {
  double err_t;
  double err_lambda;
};

SingleBinCheck check_single_bin(const Signal& s, const FrameLayout& layout, std::size_t i0,
                                std::size_t f0, double step) {
  const auto spec = dstft_forward(s, layout);
  ComplexSpectrogram cot(spec.frames(), spec.bins());
  cot(i0, f0) = spec(i0, f0);
  const GradientSet g = dstft_backward(s, layout, cot);

  auto fd = [&](bool position) {
    FrameLayout plus = layout, minus = layout;
    (position ? plus.positions : plus.lengths)[i0] += step;
    (position ? minus.positions : minus.lengths)[i0] -= step;
    return (bin_power(s, plus, i0, f0) - bin_power(s, minus, i0, f0)) / (2 * step);
  };
  const double fd_t = fd(true);
  const double fd_l = fd(false);
  const double floor = 1e-3 * std::max(std::abs(g.d_t[i0]), std::abs(g.d_lambda[i0])) + 1e-300;
  return {std::abs(g.d_t[i0] - fd_t) / std::max({std::abs(fd_t), std::abs(g.d_t[i0]), floor}),
          std::abs(g.d_lambda[i0] - fd_l) /
              std::max({std::abs(fd_l), std::abs(g.d_lambda[i0]), floor})};
}

TEST(DstftBackward, SingleBinPowerMatchesFiniteDifferences) {
  std::mt19937_64 rng(0);
  const Signal s = test::random_signal(rng, 128);
  const FrameLayout layout = test::random_layout(rng, s.size(), 16, 3, WindowKind::Hann);
  for (std::size_t i0 = 0; i0 < 3; ++i0) {
    for (std::size_t f0 : {0u, 1u, 5u, 8u, 13u}) {
      const auto e = check_single_bin(s, layout, i0, f0, 1e-4);
      EXPECT_LT(e.err_t, 1e-5) << "frame " << i0 << " bin " << f0;
      EXPECT_LT(e.err_lambda, 1e-5) << "frame " << i0 << " bin " << f0;
    }
  }
}

TEST(DstftBackwardProperty, RandomInstancesMatchFiniteDifferences) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::array{16, 32, 48, 64}[rng() % 4];
    const Signal s = test::random_signal(rng, 64 + rng() % 400);
    const std::size_t frames = 1 + rng() % 4;
    const WindowKind kind = rng() % 2 ? WindowKind::Hann : WindowKind::Gaussian;
    const FrameLayout layout = test::random_layout(rng, s.size(), n, frames, kind);
    const std::size_t i0 = rng() % frames;
    const std::size_t f0 = rng() % static_cast<std::size_t>(n);
    const auto e = check_single_bin(s, layout, i0, f0, 1e-4);
    EXPECT_LT(e.err_t, 1e-5) << "trial " << trial;
    EXPECT_LT(e.err_lambda, 1e-5) << "trial " << trial;
  }
}

TEST(DstftBackward, FastPathMatchesReference) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = trial % 2 ? 64 : 40;
    const Signal s = test::random_signal(rng, 400);
    const FrameLayout layout = test::random_layout(rng, s.size(), n, 4, WindowKind::Hann);
    ComplexSpectrogram cot(4, static_cast<std::size_t>(n));
    for (auto& c : cot.data()) c = {test::uniform(rng, -1, 1), test::uniform(rng, -1, 1)};
    const GradientSet fast = dstft_backward(s, layout, cot);
    const GradientSet slow = reference::dstft_backward(s, layout, cot);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_NEAR(fast.d_t[i], slow.d_t[i], 1e-10 * (1 + std::abs(slow.d_t[i])));
      EXPECT_NEAR(fast.d_lambda[i], slow.d_lambda[i], 1e-10 * (1 + std::abs(slow.d_lambda[i])));
    }
  }
}

// The position kernel without the 1/N factor, -w' + 2j pi f w, disagrees with
// finite differences for every bin f != 0.
TEST(DstftBackward, KernelWithoutInverseSupportFailsFiniteDifferences) {
  std::mt19937_64 rng(4);
  const Signal s = test::random_signal(rng, 256);
  const FrameLayout layout = test::random_layout(rng, s.size(), 32, 2, WindowKind::Hann);
  const FrameJacobian jac = dstft_jacobian(s, layout);
  const double n = 32.0;
  const double h = 1e-5;
  int mismatches = 0;
  for (std::size_t f = 1; f < 32; ++f) {
    FrameLayout plus = layout, minus = layout;
    plus.positions[0] += h;
    minus.positions[0] -= h;
    const Complex fd = (reference::dstft_forward(s, plus)(0, f) -
                        reference::dstft_forward(s, minus)(0, f)) / (2 * h);
    const Complex corrected = jac.d_t(0, f);
    const Complex printed = corrected + Complex(0.0, 2 * kPi * f * (1.0 - 1.0 / n)) * jac.value(0, f);
    EXPECT_LT(std::abs(corrected - fd), 1e-6 * (1 + std::abs(fd)));
    if (std::abs(printed - fd) > 1e-3 * (1 + std::abs(fd))) ++mismatches;
  }
  EXPECT_EQ(mismatches, 31);
}

std::vector<Complex> frame_at(const Signal& s, FrameLayout layout, double t) {
  layout.positions = {t};
  const auto spec = reference::dstft_forward(s, layout);
  return {spec.row(0).begin(), spec.row(0).end()};
}

double distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::norm(a[k] - b[k]);
  return std::sqrt(acc);
}

TEST(DstftProperty, ContinuousAcrossIntegerPositions) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::array{16, 32, 64}[rng() % 3];
    const Signal s = test::random_signal(rng, 300);
    FrameLayout layout = integer_layout({0.0}, n);
    layout.lengths = {test::uniform(rng, 0.25 * n, n)};
    const double p = static_cast<double>(rng() % 250);
    double previous = 0.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const double gap = distance(frame_at(s, layout, p - eps), frame_at(s, layout, p + eps));
      if (eps < 1e-2) {
        const double ratio = previous / gap;
        EXPECT_GT(ratio, 1.0) << "p=" << p;
        EXPECT_LT(ratio, 100.0) << "p=" << p;
      }
      previous = gap;
    }
  }
}

TEST(DstftProperty, OneSidedSlopesAgreeAtIntegerPositions) {
  std::mt19937_64 rng(13);
  constexpr double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::array{16, 32, 64}[rng() % 3];
    const Signal s = test::random_signal(rng, 300);
    FrameLayout layout = integer_layout({0.0}, n);
    layout.lengths = {test::uniform(rng, 0.25 * n, n)};
    const double p = static_cast<double>(1 + rng() % 250);
    const auto at = frame_at(s, layout, p);
    const auto up = frame_at(s, layout, p + h);
    const auto down = frame_at(s, layout, p - h);
    std::vector<Complex> slope_up(at.size()), slope_down(at.size());
    for (std::size_t k = 0; k < at.size(); ++k) {
      slope_up[k] = (up[k] - at[k]) / h;
      slope_down[k] = (at[k] - down[k]) / h;
    }
    double norm_up = 0.0;
    for (const auto& v : slope_up) norm_up += std::norm(v);
    EXPECT_LT(distance(slope_up, slope_down) / std::sqrt(norm_up), 1e-3) << "p=" << p;
  }
}

TEST(TrueHopLengths, EqualLengthsReduceToHops) {
  FrameLayout layout = integer_layout({3.0, 10.0, 25.5}, 16);
  layout.lengths = {9.0, 9.0, 9.0};
  const auto hops = true_hop_lengths(layout);
  EXPECT_DOUBLE_EQ(hops[1], 7.0);
  EXPECT_DOUBLE_EQ(hops[2], 15.5);
}

TEST(TrueHopLengths, FirstHopStartsAtWindowEdge) {
  FrameLayout layout = integer_layout({0.0}, 16);
  EXPECT_DOUBLE_EQ(true_hop_lengths(layout)[0], 0.0);
}

TEST(TrueHopLengths, MixedLengths) {
  FrameLayout layout = integer_layout({10.0, 30.0}, 16);
  layout.lengths = {8.0, 12.0};
  const auto hops = true_hop_lengths(layout);
  EXPECT_DOUBLE_EQ(hops[0], 14.0);
  EXPECT_DOUBLE_EQ(hops[1], 22.0);
}

}  // namespace
}  // namespace dstft
