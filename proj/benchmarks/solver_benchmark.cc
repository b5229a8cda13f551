// Copyright 2026 The mdvrp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "mdvrp/oracle.h"
#include "mdvrp/policy.h"
#include "mdvrp/rollout.h"
#include "mdvrp/trainer.h"

namespace mdvrp {
namespace {

void BM_Encode(benchmark::State& state) {
  const PolicyParams p = MakeInitializedPolicy(PolicyConfig{}, 1, false);
  const Instance inst = GenerateInstance(static_cast<int>(state.range(0)), 3, ParseVariant("MDVRPBTW"), 1);
  for (auto _ : state) {
    ad::Tape tape;
    BoundPolicy policy(tape, p);
    benchmark::DoNotOptimize(tape.value(Encode(policy, Embed(policy, inst))).values().data());
  }
}
BENCHMARK(BM_Encode)->Arg(20)->Arg(50)->Arg(100);

void BM_GreedyRollout(benchmark::State& state) {
  const PolicyParams p = MakeInitializedPolicy(PolicyConfig{}, 1, false);
  const Instance inst = GenerateInstance(static_cast<int>(state.range(0)), 3, ParseVariant("MDVRPILTW"), 2);
  RolloutOptions options;
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(Rollout(p, inst, options, rng).size());
}
BENCHMARK(BM_GreedyRollout)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Exhaustive(benchmark::State& state) {
  const Instance inst = GenerateInstance(static_cast<int>(state.range(0)), 2, ParseVariant("MDVRPTW"), 3);
  OracleOptions options;
  options.nearest_return_bound = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(ExhaustiveSolve(inst, options).cost);
}
BENCHMARK(BM_Exhaustive)->Args({6, 0})->Args({6, 1})->Args({8, 1})->Unit(benchmark::kMillisecond);

void BM_BatchGradient(benchmark::State& state) {
  const PolicyParams p = MakeInitializedPolicy(PolicyConfig{}, 1, false);
  std::vector<Instance> batch;
  for (int i = 0; i < 8; ++i) batch.push_back(GenerateInstance(8, 2, ParseVariant("MDVRP"), 10 + i));
  const LossKind loss = state.range(0) ? LossKind::kPreference : LossKind::kReinforce;
  for (auto _ : state) benchmark::DoNotOptimize(ComputeBatchGradient(p, batch, loss, kDefaultAlpha, 1, {}, 1).loss);
}
BENCHMARK(BM_BatchGradient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mdvrp

BENCHMARK_MAIN();
