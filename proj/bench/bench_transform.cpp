// Serial direct-summation reference vs the parallel FFT-backed kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "dstft/objectives.hpp"
#include "dstft/optimizer.hpp"
#include "dstft/signal_io.hpp"
#include "dstft/transform.hpp"

namespace {

using namespace dstft;

struct Problem {
  Signal signal;
  FrameLayout layout;
  ComplexSpectrogram cotangent;
};

Problem make_problem(int support_n) {
  Problem p;
  p.signal = reference_signal();
  p.layout = init_uniform(p.signal.size(), 32, support_n, WindowKind::Hann);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> jitter(0.05, 0.95);
  for (std::size_t i = 0; i < p.layout.frames(); ++i) {
    p.layout.positions[i] += jitter(rng);
    p.layout.lengths[i] = 0.8 * support_n;
  }
  p.cotangent = dstft_forward(p.signal, p.layout);
  return p;
}

void BM_ReferenceForward(benchmark::State& state) {
  const Problem p = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::dstft_forward(p.signal, p.layout));
}

void BM_ParallelForward(benchmark::State& state) {
  const Problem p = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dstft_forward(p.signal, p.layout));
}

void BM_ReferenceBackward(benchmark::State& state) {
  const Problem p = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::dstft_backward(p.signal, p.layout, p.cotangent));
  }
}

void BM_ParallelBackward(benchmark::State& state) {
  const Problem p = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dstft_backward(p.signal, p.layout, p.cotangent));
}

void BM_ObjectiveEvaluation(benchmark::State& state) {
  const Problem p = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_objectives(p.signal, p.layout));
}

BENCHMARK(BM_ReferenceForward)->Arg(64)->Arg(256);
BENCHMARK(BM_ParallelForward)->Arg(64)->Arg(256);
BENCHMARK(BM_ReferenceBackward)->Arg(64)->Arg(256);
BENCHMARK(BM_ParallelBackward)->Arg(64)->Arg(256);
BENCHMARK(BM_ObjectiveEvaluation)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
