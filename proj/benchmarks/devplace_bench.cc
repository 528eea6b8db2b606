// Copyright 2026 The DevPlace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "devplace/baselines.h"
#include "devplace/generators.h"
#include "devplace/grouping.h"
#include "devplace/policy.h"
#include "devplace/simulator.h"
#include "devplace/topology.h"

namespace devplace {
namespace {

ComputationGraph Rnnlm(int layers, int steps) {
  GeneratorSpec spec;
  spec.layers = layers;
  spec.steps = steps;
  return *Generate(spec);
}

Placement RandomPlacement(int groups, int devices, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Placement p{std::vector<int>(groups)};
  for (int& d : p.devices) d = static_cast<int>(rng() % devices);
  return p;
}

void BM_Simulate(benchmark::State& state) {
  const GroupedGraph gg = CoalesceSoleConsumers(Rnnlm(2, state.range(0)));
  const DeviceTopology topo = WorkstationTopology(4);
  const Placement p = RandomPlacement(gg.num_groups(), topo.num_devices(), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Simulate(gg, topo, p));
  }
  state.counters["groups"] = gg.num_groups();
}
BENCHMARK(BM_Simulate)->Arg(3)->Arg(10)->Arg(40);

void BM_Coalesce(benchmark::State& state) {
  const ComputationGraph g = Rnnlm(2, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(CoalesceSoleConsumers(g));
  }
  state.counters["ops"] = g.num_ops();
}
BENCHMARK(BM_Coalesce)->Arg(3)->Arg(40);

void BM_GradLogProb(benchmark::State& state) {
  const ComputationGraph g = Rnnlm(2, 3);
  const GroupedGraph gg = CoalesceSoleConsumers(g);
  const ComputationGraph* corpus[] = {&g};
  const EmbeddingSpec spec = EmbeddingSpec::Build(corpus);
  const PolicyInputs inputs = EmbedGroups(gg, spec);
  const PolicyParams params = PolicyParams::RandomUniform(
      ShapeFor(spec, 5, static_cast<int>(state.range(0)), 16), 1, 0.1);
  const Placement p = RandomPlacement(gg.num_groups(), 5, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(GradLogProb(params, inputs, p));
  }
  state.counters["params"] = static_cast<double>(params.size());
}
BENCHMARK(BM_GradLogProb)->Arg(16)->Arg(64);

void BM_ForwardSample(benchmark::State& state) {
  const ComputationGraph g = Rnnlm(2, 3);
  const GroupedGraph gg = CoalesceSoleConsumers(g);
  const ComputationGraph* corpus[] = {&g};
  const EmbeddingSpec spec = EmbeddingSpec::Build(corpus);
  const PolicyInputs inputs = EmbedGroups(gg, spec);
  const PolicyParams params =
      PolicyParams::RandomUniform(ShapeFor(spec, 5, 64, 16), 1, 0.1);
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ForwardSample(params, inputs, rng));
  }
}
BENCHMARK(BM_ForwardSample);

void BM_Mincut(benchmark::State& state) {
  const GroupedGraph gg = CoalesceSoleConsumers(Rnnlm(2, state.range(0)));
  const DeviceTopology topo = WorkstationTopology(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(PlaceMincut(gg, topo, false));
  }
  state.counters["groups"] = gg.num_groups();
}
BENCHMARK(BM_Mincut)->Arg(3)->Arg(40);

void BM_BruteForce(benchmark::State& state) {
  const GroupedGraph gg = CoalesceSoleConsumers(Rnnlm(1, 1));  // 10 groups
  const DeviceTopology topo = WorkstationTopology(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BruteForce(gg, topo));
  }
}
BENCHMARK(BM_BruteForce)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace devplace

BENCHMARK_MAIN();
