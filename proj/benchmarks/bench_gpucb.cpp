#include <benchmark/benchmark.h>

#include "cabo/gpucb.hpp"

namespace {

void BM_GpUcbPropose(benchmark::State& state) {
  const int history = static_cast<int>(state.range(0));
  cabo::GpUcbTuner tuner;
  for (int i = 0; i < history; ++i) {
    const double l = static_cast<double>(i % 101) / 100.0;
    tuner.record(l, 0.5 + 0.3 * l);
  }
  int t = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tuner.propose(t++));
  }
}

void BM_GpUcbRecordRefit(benchmark::State& state) {
  cabo::GpUcbConfig cfg;
  cfg.history_capacity = static_cast<int>(state.range(0));
  cabo::GpUcbTuner tuner(cfg);
  for (int i = 0; i < cfg.history_capacity; ++i) {
    tuner.record(static_cast<double>(i % 101) / 100.0, 0.5);
  }
  int step = 0;
  for (auto _ : state) {
    tuner.record(static_cast<double>(step % 101) / 100.0, 0.5);
    ++step;
    benchmark::DoNotOptimize(tuner.posterior(0.5));  // forces the refit
  }
}

}  // namespace

BENCHMARK(BM_GpUcbPropose)->Arg(100)->Arg(500);
BENCHMARK(BM_GpUcbRecordRefit)->Arg(100)->Arg(500);
