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

#include "devplace/baselines.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "devplace/status_macros.h"

namespace devplace {

std::string BaselineName(const BaselineKind& kind) {
  struct Namer {
    std::string operator()(const SingleDevice& k) const {
      return absl::StrCat("single_device:", k.device);
    }
    std::string operator()(const ExpertContiguous& k) const {
      return absl::StrCat("expert_contiguous:", k.parts);
    }
    std::string operator()(const MincutAllDevices&) const {
      return "mincut_all_devices";
    }
    std::string operator()(const MincutGpuOnly&) const { return "mincut_gpu_only"; }
    std::string operator()(const RandomSearch& k) const {
      return absl::StrCat("random_search:", k.budget, ":", k.seed);
    }
    std::string operator()(const BruteForceSearch&) const { return "brute_force"; }
  };
  return std::visit(Namer{}, kind);
}

absl::StatusOr<BaselineKind> ParseBaselineKind(std::string_view text) {
  const absl::string_view sv(text.data(), text.size());
  std::vector<absl::string_view> parts = absl::StrSplit(sv, ':');
  const absl::string_view name = parts[0];
  auto int_arg = [&](size_t i, int fallback) -> absl::StatusOr<int> {
    if (parts.size() <= i) return fallback;
    int v = 0;
    if (!absl::SimpleAtoi(parts[i], &v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad numeric argument in '", sv, "'"));
    }
    return v;
  };
  if (name == "single_device" || name == "single") {
    ASSIGN_OR_RETURN(int device, int_arg(1, 0));
    return SingleDevice{device};
  }
  if (name == "expert_contiguous" || name == "expert") {
    ASSIGN_OR_RETURN(int p, int_arg(1, 2));
    return ExpertContiguous{p};
  }
  if (name == "mincut_all_devices" || name == "scotch") return MincutAllDevices{};
  if (name == "mincut_gpu_only" || name == "mincut") return MincutGpuOnly{};
  if (name == "random_search" || name == "random") {
    ASSIGN_OR_RETURN(int budget, int_arg(1, 1000));
    ASSIGN_OR_RETURN(int seed, int_arg(2, 0));
    return RandomSearch{budget, static_cast<uint64_t>(seed)};
  }
  if (name == "brute_force" || name == "bruteforce") return BruteForceSearch{};
  return absl::InvalidArgumentError(absl::StrCat("unknown baseline '", sv, "'"));
}

absl::StatusOr<Placement> PlaceSingle(const GroupedGraph& gg,
                                      const DeviceTopology& topo, int device) {
  if (device < 0 || device >= topo.num_devices()) {
    return absl::InvalidArgumentError(
        absl::StrCat("device ", device, " not in topology"));
  }
  return Placement{std::vector<int>(gg.num_groups(), device)};
}

absl::StatusOr<Placement> PlaceExpertContiguous(const GroupedGraph& gg,
                                                const DeviceTopology& topo,
                                                int parts) {
  const int n = gg.num_groups();
  if (parts < 1 || parts > std::min(topo.num_devices(), n)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expert placement needs 1 <= parts <= min(devices, groups); got ", parts));
  }
  std::vector<int> devices = topo.DevicesOfKind(DeviceKind::kGpu);
  for (int cpu : topo.DevicesOfKind(DeviceKind::kCpu)) devices.push_back(cpu);

  double total = gg.TotalCost();
  const bool by_count = total <= 0.0;
  if (by_count) total = n;
  Placement p{std::vector<int>(n, 0)};
  int block = 0;
  double cumulative = 0.0;
  const std::vector<int>& order = gg.topo_order();
  for (int idx = 0; idx < n; ++idx) {
    const int g = order[idx];
    p.devices[g] = devices[block];
    cumulative += by_count ? 1.0 : gg.group(g).compute_cost;
    const int groups_left = n - idx - 1;
    const int blocks_left = parts - 1 - block;
    if (blocks_left > 0 && groups_left > 0 &&
        (cumulative * parts >= (block + 1) * total || groups_left == blocks_left)) {
      ++block;
    }
  }
  return p;
}

absl::StatusOr<Placement> PlaceMincut(const GroupedGraph& gg,
                                      const DeviceTopology& topo,
                                      bool include_cpu, uint64_t seed,
                                      MincutStats* stats) {
  std::vector<int> eligible;
  for (const Device& dev : topo.devices()) {
    if (include_cpu || dev.kind == DeviceKind::kGpu) eligible.push_back(dev.id);
  }
  if (eligible.empty()) {
    return absl::FailedPreconditionError("no eligible device for min-cut mapping");
  }
  std::stable_sort(eligible.begin(), eligible.end(), [&](int a, int b) {
    return topo.device(a).compute_rate > topo.device(b).compute_rate;
  });

  std::vector<double> weights;
  for (const Group& g : gg.groups()) weights.push_back(g.compute_cost);
  PartitionGraph graph = PartitionGraph::WithVertices(std::move(weights));
  for (const GroupEdge& e : gg.group_edges()) {
    graph.AddEdge(e.src, e.dst, static_cast<double>(e.tensor_bytes));
  }
  PartitionOptions options;
  for (int id : eligible) options.target_fractions.push_back(topo.device(id).compute_rate);
  options.seed = seed;
  PartitionResult parts = MultilevelPartition(graph, options);

  // Heaviest part onto the fastest device.
  const int k = static_cast<int>(eligible.size());
  std::vector<int> by_weight(k);
  std::iota(by_weight.begin(), by_weight.end(), 0);
  std::stable_sort(by_weight.begin(), by_weight.end(), [&](int a, int b) {
    return parts.part_weight[a] > parts.part_weight[b];
  });
  std::vector<int> device_of_part(k);
  for (int i = 0; i < k; ++i) device_of_part[by_weight[i]] = eligible[i];

  Placement p{std::vector<int>(gg.num_groups(), 0)};
  for (int g = 0; g < gg.num_groups(); ++g) p.devices[g] = device_of_part[parts.part[g]];
  if (stats != nullptr) {
    stats->cut_bytes = parts.cut;
    stats->balanced = parts.balanced;
    stats->refine_passes = parts.refine_passes;
  }
  return p;
}

absl::StatusOr<Placement> PlaceRandomSearch(const GroupedGraph& gg,
                                            const DeviceTopology& topo,
                                            int budget, uint64_t seed) {
  if (budget < 1) return absl::InvalidArgumentError("budget must be >= 1");
  // Distinct placements to evaluate: min(budget, D^groups).
  uint64_t distinct = static_cast<uint64_t>(budget);
  {
    uint64_t space = 1;
    const uint64_t d = static_cast<uint64_t>(topo.num_devices());
    for (int i = 0; i < gg.num_groups() && space < distinct; ++i) space *= d;
    distinct = std::min(distinct, space);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, topo.num_devices() - 1);
  std::set<std::vector<int>> seen;
  std::optional<Placement> best;
  double best_makespan = 0.0;
  Placement p{std::vector<int>(gg.num_groups(), 0)};
  while (seen.size() < distinct) {
    for (int& dev : p.devices) dev = pick(rng);
    if (!seen.insert(p.devices).second) continue;
    ASSIGN_OR_RETURN(SimReport report, Simulate(gg, topo, p));
    if (!report.feasible) continue;
    if (!best.has_value() || report.makespan_seconds < best_makespan) {
      best = p;
      best_makespan = report.makespan_seconds;
    }
  }
  if (!best.has_value()) {
    return absl::NotFoundError("random search found no feasible placement");
  }
  return *best;
}

absl::StatusOr<BruteForceResult> BruteForce(const GroupedGraph& gg,
                                            const DeviceTopology& topo,
                                            uint64_t cap) {
  const int n = gg.num_groups();
  const uint64_t d = static_cast<uint64_t>(topo.num_devices());
  uint64_t space = 1;
  for (int i = 0; i < n; ++i) {
    if (space > cap / d) {
      return absl::ResourceExhaustedError(absl::StrCat(
          d, "^", n, " placements exceed the enumeration cap of ", cap));
    }
    space *= d;
  }
  if (space > cap) {
    return absl::ResourceExhaustedError(absl::StrCat(
        d, "^", n, " placements exceed the enumeration cap of ", cap));
  }

  BruteForceResult best;
  bool found = false;
  Placement p{std::vector<int>(n, 0)};
  for (uint64_t index = 0; index < space; ++index) {
    if (index > 0) {
      // Odometer with the last group least significant: lexicographic order.
      for (int i = n - 1; i >= 0; --i) {
        if (++p.devices[i] < static_cast<int>(d)) break;
        p.devices[i] = 0;
      }
    }
    ASSIGN_OR_RETURN(SimReport report, Simulate(gg, topo, p));
    ++best.evaluated;
    if (!report.feasible) continue;
    if (!found || report.makespan_seconds < best.report.makespan_seconds) {
      found = true;
      best.placement = p;
      best.report = std::move(report);
    }
  }
  if (!found) return absl::NotFoundError("no feasible placement exists");
  return best;
}

absl::StatusOr<Placement> RunBaseline(const GroupedGraph& gg,
                                      const DeviceTopology& topo,
                                      const BaselineKind& kind) {
  if (const auto* k = std::get_if<SingleDevice>(&kind)) {
    return PlaceSingle(gg, topo, k->device);
  }
  if (const auto* k = std::get_if<ExpertContiguous>(&kind)) {
    return PlaceExpertContiguous(gg, topo, k->parts);
  }
  if (std::holds_alternative<MincutAllDevices>(kind)) {
    return PlaceMincut(gg, topo, /*include_cpu=*/true);
  }
  if (std::holds_alternative<MincutGpuOnly>(kind)) {
    return PlaceMincut(gg, topo, /*include_cpu=*/false);
  }
  if (const auto* k = std::get_if<RandomSearch>(&kind)) {
    return PlaceRandomSearch(gg, topo, k->budget, k->seed);
  }
  ASSIGN_OR_RETURN(BruteForceResult r, BruteForce(gg, topo));
  return r.placement;
}

}  // namespace devplace
