#include <benchmark/benchmark.h>

#include "cabo/arm_policies.hpp"
#include "cabo/environment.hpp"

namespace {

// One full event through the stage loop on a 9-skill grouped schema.
void BM_PolicyStep(benchmark::State& state) {
  const int budget = static_cast<int>(state.range(0));
  const auto ds = cabo::synth_skills(512, 9, {18, 9, 4, 7, 6, 27, 11, 29, 30}, 20, 5);
  cabo::PolicySpec spec;
  spec.kind = cabo::PolicyKind::Catso;
  spec.exploration = 0.25;
  cabo::OrchestrationPolicy policy(spec, ds.schema, ds.num_classes, budget);
  cabo::RunRngs rngs(9);
  Eigen::Index row = 0;
  for (auto _ : state) {
    cabo::RevealSession session(ds, row, budget);
    benchmark::DoNotOptimize(policy.step(session, rngs));
    row = (row + 1) % ds.num_events();
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_TsrcStep(benchmark::State& state) {
  const auto ds = cabo::synth_skills(512, 9, {18, 9, 4, 7, 6, 27, 11, 29, 30}, 20, 5);
  cabo::PolicySpec spec;
  spec.kind = cabo::PolicyKind::Tsrc;
  spec.exploration = 0.25;
  cabo::OrchestrationPolicy policy(spec, ds.schema, ds.num_classes, 3);
  cabo::RunRngs rngs(9);
  Eigen::Index row = 0;
  for (auto _ : state) {
    cabo::RevealSession session(ds, row, 3);
    benchmark::DoNotOptimize(policy.step(session, rngs));
    row = (row + 1) % ds.num_events();
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_PolicyStep)->Arg(1)->Arg(3)->Arg(9);
BENCHMARK(BM_TsrcStep);
