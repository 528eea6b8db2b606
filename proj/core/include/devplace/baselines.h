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

#ifndef DEVPLACE_BASELINES_H_
#define DEVPLACE_BASELINES_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "absl/status/statusor.h"
#include "devplace/grouping.h"
#include "devplace/partitioner.h"
#include "devplace/simulator.h"
#include "devplace/topology.h"

namespace devplace {

struct SingleDevice {
  int device = 0;
};
struct ExpertContiguous {
  int parts = 2;
};
struct MincutAllDevices {};
struct MincutGpuOnly {};
struct RandomSearch {
  int budget = 1000;
  uint64_t seed = 0;
};
struct BruteForceSearch {};

using BaselineKind = std::variant<SingleDevice, ExpertContiguous,
                                  MincutAllDevices, MincutGpuOnly, RandomSearch,
                                  BruteForceSearch>;

// Names used in reports: "single_device:1", "expert_contiguous:2",
// "mincut_all_devices", "mincut_gpu_only", "random_search:500:7",
// "brute_force". ParseBaselineKind accepts the same strings.
std::string BaselineName(const BaselineKind& kind);
absl::StatusOr<BaselineKind> ParseBaselineKind(std::string_view text);

absl::StatusOr<Placement> PlaceSingle(const GroupedGraph& gg,
                                      const DeviceTopology& topo, int device);

// Groups in topological order are cut greedily into `parts` contiguous blocks
// of roughly equal cumulative cost; block i goes to the i-th device of the
// list "gpus ascending, then cpus ascending".
absl::StatusOr<Placement> PlaceExpertContiguous(const GroupedGraph& gg,
                                                const DeviceTopology& topo,
                                                int parts);

struct MincutStats {
  double cut_bytes = 0.0;
  bool balanced = true;
  std::vector<std::pair<double, double>> refine_passes;
};

// Min-cut static mapping: vertex weight = group compute cost, edge weight =
// tensor bytes. Part targets are proportional to the eligible devices'
// compute rates; parts are then matched heaviest-to-fastest.
absl::StatusOr<Placement> PlaceMincut(const GroupedGraph& gg,
                                      const DeviceTopology& topo,
                                      bool include_cpu, uint64_t seed = 0,
                                      MincutStats* stats = nullptr);

// Best feasible placement among `budget` distinct uniformly drawn placements
// (repeats are redrawn, so a budget >= D^groups covers the whole space);
// NotFound if none of them fits in memory.
absl::StatusOr<Placement> PlaceRandomSearch(const GroupedGraph& gg,
                                            const DeviceTopology& topo,
                                            int budget, uint64_t seed);

struct BruteForceResult {
  Placement placement;
  SimReport report;
  uint64_t evaluated = 0;
};

inline constexpr uint64_t kDefaultBruteForceCap = uint64_t{1} << 20;

// Exact minimum-makespan feasible placement by enumeration; ties go to the
// lexicographically smallest assignment. Fails with ResourceExhausted when
// D^groups exceeds `cap` and NotFound when nothing is feasible.
absl::StatusOr<BruteForceResult> BruteForce(
    const GroupedGraph& gg, const DeviceTopology& topo,
    uint64_t cap = kDefaultBruteForceCap);

absl::StatusOr<Placement> RunBaseline(const GroupedGraph& gg,
                                      const DeviceTopology& topo,
                                      const BaselineKind& kind);

}  // namespace devplace

#endif  // DEVPLACE_BASELINES_H_
