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

#include "devplace/grouping.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dag_util.h"

namespace devplace {
namespace {

// Union-find over op ids that also tracks the member list of each root.
class GroupSets {
 public:
  explicit GroupSets(int n) : parent_(n), members_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
    for (int i = 0; i < n; ++i) members_[i] = {i};
  }

  int Find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void Union(int a, int b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    if (members_[a].size() < members_[b].size()) std::swap(a, b);
    parent_[b] = a;
    members_[a].insert(members_[a].end(), members_[b].begin(), members_[b].end());
    members_[b].clear();
  }

  bool IsRoot(int x) const { return parent_[x] == x; }
  const std::vector<int>& members(int root) const { return members_[root]; }

 private:
  std::vector<int> parent_;
  std::vector<std::vector<int>> members_;
};

}  // namespace

absl::StatusOr<GroupedGraph> GroupedGraph::FromPartition(
    const ComputationGraph& graph, const std::vector<int>& membership) {
  const int m = graph.num_ops();
  if (static_cast<int>(membership.size()) != m) {
    return absl::InvalidArgumentError(absl::StrCat(
        "membership has ", membership.size(), " entries for ", m, " ops"));
  }
  // Renumber labels by smallest member op id (ops are visited ascending).
  std::map<int, int> relabel;
  std::vector<int> group_of(m);
  for (int op = 0; op < m; ++op) {
    auto [it, inserted] =
        relabel.emplace(membership[op], static_cast<int>(relabel.size()));
    group_of[op] = it->second;
  }
  const int n = static_cast<int>(relabel.size());

  GroupedGraph gg;
  gg.groups_.resize(n);
  gg.membership_ = group_of;
  for (int op = 0; op < m; ++op) {
    Group& g = gg.groups_[group_of[op]];
    const Operation& o = graph.op(op);
    g.members.push_back(op);
    g.compute_cost += o.compute_cost;
    g.param_bytes += o.param_bytes;
    ++g.type_counts[o.type];
  }

  std::map<std::pair<int, int>, int64_t> merged_edges;
  for (int op = 0; op < m; ++op) {
    const int src_group = group_of[op];
    bool leaves_group = false;
    for (int ei : graph.out_edges(op)) {
      const Edge& e = graph.edges()[ei];
      gg.groups_[src_group].output_bytes += e.tensor_bytes;
      const int dst_group = group_of[e.dst];
      if (dst_group != src_group) {
        leaves_group = true;
        merged_edges[{src_group, dst_group}] += e.tensor_bytes;
      }
    }
    const int64_t elements = graph.op(op).OutputElements();
    if (leaves_group && elements > 0) {
      gg.groups_[src_group].output_elements.push_back(elements);
    }
  }

  gg.out_edges_.resize(n);
  gg.in_edges_.resize(n);
  std::vector<std::vector<int>> succ(n);
  for (const auto& [key, bytes] : merged_edges) {
    const int idx = static_cast<int>(gg.group_edges_.size());
    gg.group_edges_.push_back({key.first, key.second, bytes});
    gg.out_edges_[key.first].push_back(idx);
    gg.in_edges_[key.second].push_back(idx);
    succ[key.first].push_back(key.second);
  }

  gg.topo_order_ = internal::MinHeapTopoSort(succ);
  if (static_cast<int>(gg.topo_order_.size()) != n) {
    return absl::InvalidArgumentError("grouping induces a cycle");
  }
  gg.topo_rank_.resize(n);
  for (int i = 0; i < n; ++i) gg.topo_rank_[gg.topo_order_[i]] = i;
  return gg;
}

double GroupedGraph::TotalCost() const {
  double total = 0.0;
  for (const Group& g : groups_) total += g.compute_cost;
  return total;
}

int64_t GroupedGraph::TotalParamBytes() const {
  int64_t total = 0;
  for (const Group& g : groups_) total += g.param_bytes;
  return total;
}

GroupedGraph CoalesceSoleConsumers(const ComputationGraph& graph,
                                   const CoalesceOptions& options) {
  const int m = graph.num_ops();
  GroupSets sets(m);
  for (const auto& group : graph.manual_groups()) {
    for (int id : group) sets.Union(group.front(), id);
  }

  std::mt19937_64 rng(options.shuffle_seed.value_or(0));
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> candidates;
    for (int i = 0; i < m; ++i) {
      if (sets.IsRoot(i)) candidates.push_back(i);
    }
    if (options.shuffle_seed.has_value()) {
      std::shuffle(candidates.begin(), candidates.end(), rng);
    } else {
      // Roots are op ids; order them by the smallest member op id.
      std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
        const auto& ma = sets.members(a);
        const auto& mb = sets.members(b);
        return *std::min_element(ma.begin(), ma.end()) <
               *std::min_element(mb.begin(), mb.end());
      });
    }
    for (int candidate : candidates) {
      const int root = sets.Find(candidate);
      if (root != candidate) continue;  // absorbed earlier in this sweep
      int target = -1;
      bool single = true;
      for (int op : sets.members(root)) {
        for (int ei : graph.out_edges(op)) {
          const int dst = sets.Find(graph.edges()[ei].dst);
          if (dst == root) continue;
          if (target < 0) {
            target = dst;
          } else if (dst != target) {
            single = false;
            break;
          }
        }
        if (!single) break;
      }
      if (single && target >= 0) {
        sets.Union(target, root);
        changed = true;
      }
    }
  }

  std::vector<int> membership(m);
  for (int op = 0; op < m; ++op) membership[op] = sets.Find(op);
  auto grouped = GroupedGraph::FromPartition(graph, membership);
  // Seed groups are acyclic (checked at graph creation) and a merge of a group
  // into its sole successor cannot close a cycle.
  return *std::move(grouped);
}

std::vector<int> TopoOrder(const GroupedGraph& gg) { return gg.topo_order(); }

ComputationGraph GroupedAsGraph(const GroupedGraph& gg) {
  std::vector<Operation> ops;
  ops.reserve(gg.num_groups());
  for (int i = 0; i < gg.num_groups(); ++i) {
    const Group& g = gg.group(i);
    Operation op;
    op.id = i;
    op.name = absl::StrCat("group_", i);
    op.type = "group";
    op.compute_cost = g.compute_cost;
    op.param_bytes = g.param_bytes;
    ops.push_back(std::move(op));
  }
  std::vector<Edge> edges;
  for (const GroupEdge& e : gg.group_edges()) {
    edges.push_back({e.src, e.dst, e.tensor_bytes});
  }
  return *ComputationGraph::Create(std::move(ops), std::move(edges));
}

}  // namespace devplace
