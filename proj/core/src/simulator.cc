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

#include "devplace/simulator.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <tuple>
#include <utility>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "devplace/status_macros.h"

namespace devplace {

std::string Placement::ToString() const { return absl::StrJoin(devices, "-"); }

absl::StatusOr<Placement> Placement::Parse(std::string_view text) {
  Placement p;
  if (text.empty()) return p;
  for (absl::string_view piece :
       absl::StrSplit(absl::string_view(text.data(), text.size()), '-')) {
    int device = 0;
    if (!absl::SimpleAtoi(piece, &device) || device < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad device id '", piece, "' in placement"));
    }
    p.devices.push_back(device);
  }
  return p;
}

absl::Status ValidatePlacement(const GroupedGraph& gg,
                               const DeviceTopology& topo, const Placement& p) {
  if (p.size() != gg.num_groups()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "placement has ", p.size(), " entries for ", gg.num_groups(), " groups"));
  }
  for (int device : p.devices) {
    if (device < 0 || device >= topo.num_devices()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "placement uses device ", device, " of ", topo.num_devices()));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<MemoryReport> CheckMemory(const GroupedGraph& gg,
                                         const DeviceTopology& topo,
                                         const Placement& p) {
  RETURN_IF_ERROR(ValidatePlacement(gg, topo, p));
  MemoryReport report;
  report.peak_bytes.assign(topo.num_devices(), 0);
  for (int g = 0; g < gg.num_groups(); ++g) {
    report.peak_bytes[p[g]] += gg.group(g).param_bytes + gg.group(g).output_bytes;
  }
  for (int d = 0; d < topo.num_devices(); ++d) {
    if (report.peak_bytes[d] > topo.device(d).memory_bytes) report.feasible = false;
  }
  return report;
}

namespace {

enum class EventKind { kGroupDone = 0, kTransferDone = 1 };

struct Event {
  double time;
  EventKind kind;
  int tie;  // topo rank for groups, link index for transfers
  int id;   // group id or link index

  bool operator>(const Event& o) const {
    return std::tie(time, kind, tie, id) > std::tie(o.time, o.kind, o.tie, o.id);
  }
};

struct TransferRequest {
  double request_time;
  int producer_rank;
  int consumer_rank;
  int edge;

  bool operator>(const TransferRequest& o) const {
    return std::tie(request_time, producer_rank, consumer_rank) >
           std::tie(o.request_time, o.producer_rank, o.consumer_rank);
  }
};

struct ReadyEntry {
  double ready_time;
  int rank;
  int group;

  bool operator>(const ReadyEntry& o) const {
    return std::tie(ready_time, rank) > std::tie(o.ready_time, o.rank);
  }
};

template <typename T>
using MinHeap = std::priority_queue<T, std::vector<T>, std::greater<T>>;

}  // namespace

absl::StatusOr<SimReport> Simulate(const GroupedGraph& gg,
                                   const DeviceTopology& topo,
                                   const Placement& p) {
  ASSIGN_OR_RETURN(MemoryReport memory, CheckMemory(gg, topo, p));
  const int n = gg.num_groups();
  const int d = topo.num_devices();
  const std::vector<int>& rank = gg.topo_rank();

  SimReport report;
  report.busy_seconds.assign(d, 0.0);
  report.transfer_seconds.assign(d, 0.0);
  report.peak_bytes = std::move(memory.peak_bytes);
  report.feasible = memory.feasible;

  std::vector<int> pending(n);
  for (int g = 0; g < n; ++g) pending[g] = static_cast<int>(gg.in_edges(g).size());
  std::vector<MinHeap<ReadyEntry>> ready(d);
  std::vector<bool> device_busy(d, false);
  std::vector<MinHeap<TransferRequest>> link_queue(d * d);
  std::vector<int> link_edge(d * d, -1);  // edge in flight, -1 when idle
  std::vector<int> device_group(d, -1);
  MinHeap<Event> events;

  auto arrive = [&](int group, double t) {
    if (--pending[group] == 0) ready[p[group]].push({t, rank[group], group});
  };

  for (int g : gg.topo_order()) {
    if (pending[g] == 0) ready[p[g]].push({0.0, rank[g], g});
  }

  double now = 0.0;
  double makespan = 0.0;
  while (true) {
    // Start whatever can start at `now`: links first, then devices.
    for (int link = 0; link < d * d; ++link) {
      if (link_edge[link] >= 0 || link_queue[link].empty()) continue;
      const TransferRequest req = link_queue[link].top();
      link_queue[link].pop();
      const GroupEdge& e = gg.group_edges()[req.edge];
      const double duration =
          static_cast<double>(e.tensor_bytes) / topo.bandwidth(link / d, link % d);
      link_edge[link] = req.edge;
      report.transfer_seconds[link / d] += duration;
      events.push({now + duration, EventKind::kTransferDone, link, link});
    }
    for (int dev = 0; dev < d; ++dev) {
      if (device_busy[dev] || ready[dev].empty()) continue;
      const ReadyEntry entry = ready[dev].top();
      ready[dev].pop();
      const double duration =
          gg.group(entry.group).compute_cost / topo.device(dev).compute_rate;
      device_busy[dev] = true;
      device_group[dev] = entry.group;
      report.busy_seconds[dev] += duration;
      events.push({now + duration, EventKind::kGroupDone, entry.rank, entry.group});
    }
    if (events.empty()) break;

    // Complete everything that finishes at the next event time.
    now = events.top().time;
    while (!events.empty() && events.top().time == now) {
      const Event ev = events.top();
      events.pop();
      if (ev.kind == EventKind::kGroupDone) {
        const int g = ev.id;
        const int dev = p[g];
        device_busy[dev] = false;
        makespan = std::max(makespan, now);
        for (int ei : gg.out_edges(g)) {
          const GroupEdge& e = gg.group_edges()[ei];
          const int dst_dev = p[e.dst];
          if (dst_dev == dev || e.tensor_bytes == 0) {
            arrive(e.dst, now);
          } else {
            link_queue[dev * d + dst_dev].push({now, rank[g], rank[e.dst], ei});
          }
        }
      } else {
        const int link = ev.id;
        const int edge = link_edge[link];
        link_edge[link] = -1;
        arrive(gg.group_edges()[edge].dst, now);
      }
    }
  }
  report.makespan_seconds = makespan;
  return report;
}

absl::StatusOr<Measurement> Measure(const GroupedGraph& gg,
                                    const DeviceTopology& topo,
                                    const Placement& p,
                                    const std::optional<NoiseSpec>& noise,
                                    int steps) {
  if (steps < 2) {
    return absl::InvalidArgumentError("measurement needs at least 2 steps");
  }
  ASSIGN_OR_RETURN(SimReport report, Simulate(gg, topo, p));
  if (!report.feasible) return Measurement::Infeasible();
  const double makespan = report.makespan_seconds;
  if (!noise.has_value() || noise->sigma == 0.0) {
    return Measurement::Seconds(makespan);
  }
  std::mt19937_64 rng(noise->seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double sum = 0.0;
  for (int step = 0; step < steps; ++step) {
    const double runtime = makespan * std::exp(noise->sigma * normal(rng));
    if (step > 0) sum += runtime;  // the first step is a warm-up outlier
  }
  return Measurement::Seconds(sum / (steps - 1));
}

}  // namespace devplace
