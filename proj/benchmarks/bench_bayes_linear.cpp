#include <benchmark/benchmark.h>

#include <random>

#include "cabo/bayes_linear.hpp"
#include "cabo/rng.hpp"

namespace {

Eigen::VectorXd random_context(std::mt19937_64& rng, Eigen::Index dim) {
  Eigen::VectorXd x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x(i) = cabo::uniform_unit(rng);
  return x;
}

void BM_EstimatorUpdate(benchmark::State& state) {
  const Eigen::Index dim = state.range(0);
  cabo::GaussianLinearEstimator est(dim);
  std::mt19937_64 rng(1);
  const Eigen::VectorXd x = random_context(rng, dim);
  for (auto _ : state) {
    est.update(x, 1.0, 0.999);
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_EstimatorSample(benchmark::State& state) {
  const Eigen::Index dim = state.range(0);
  cabo::GaussianLinearEstimator est(dim);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 32; ++i) est.update(random_context(rng, dim), 1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.sample(0.25, rng));
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_EstimatorUpdate)->Arg(16)->Arg(93)->Arg(256)->Arg(721);
BENCHMARK(BM_EstimatorSample)->Arg(16)->Arg(93)->Arg(256)->Arg(721);
