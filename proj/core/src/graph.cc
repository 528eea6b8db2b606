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

#include "devplace/graph.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "dag_util.h"

namespace devplace {

int64_t Operation::OutputElements() const {
  if (output_shape.empty()) return 0;
  int64_t n = 1;
  for (int64_t d : output_shape) n *= d;
  return n;
}

absl::StatusOr<ComputationGraph> ComputationGraph::Create(
    std::vector<Operation> ops, std::vector<Edge> edges,
    std::vector<std::vector<int>> manual_groups) {
  const int m = static_cast<int>(ops.size());
  std::sort(ops.begin(), ops.end(),
            [](const Operation& a, const Operation& b) { return a.id < b.id; });
  for (int i = 0; i < m; ++i) {
    const Operation& op = ops[i];
    if (op.id != i) {
      return absl::InvalidArgumentError(absl::StrCat(
          "op ids must be dense and unique in 0..", m - 1, "; got id ", op.id,
          " at sorted position ", i));
    }
    if (!(op.compute_cost >= 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("op '", op.name, "' has negative or NaN cost"));
    }
    if (op.param_bytes < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("op '", op.name, "' has negative param_bytes"));
    }
    for (int64_t d : op.output_shape) {
      if (d < 1) {
        return absl::InvalidArgumentError(
            absl::StrCat("op '", op.name, "' has output dimension ", d));
      }
    }
  }

  std::vector<std::vector<int>> succ(m);
  for (const Edge& e : edges) {
    if (e.src < 0 || e.src >= m || e.dst < 0 || e.dst >= m) {
      return absl::InvalidArgumentError(absl::StrCat(
          "dangling edge endpoint: ", e.src, " -> ", e.dst, " with ", m,
          " ops"));
    }
    if (e.src == e.dst) {
      return absl::InvalidArgumentError(
          absl::StrCat("self loop on op '", ops[e.src].name, "'"));
    }
    if (e.tensor_bytes < 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "edge ", e.src, " -> ", e.dst, " has negative tensor bytes"));
    }
    succ[e.src].push_back(e.dst);
  }

  std::vector<int> order = internal::MinHeapTopoSort(succ);
  if (static_cast<int>(order.size()) != m) {
    std::vector<int> cycle = internal::FindCycle(succ);
    std::vector<std::string> names;
    for (int v : cycle) names.push_back(ops[v].name);
    return absl::InvalidArgumentError(
        absl::StrCat("graph has a cycle: {", absl::StrJoin(names, ", "), "}"));
  }

  // Manual groups: disjoint, in range, and their quotient must stay acyclic.
  std::vector<int> label(m);
  std::iota(label.begin(), label.end(), 0);
  std::vector<bool> claimed(m, false);
  for (auto& group : manual_groups) {
    if (group.empty()) {
      return absl::InvalidArgumentError("manual group is empty");
    }
    std::sort(group.begin(), group.end());
    for (int id : group) {
      if (id < 0 || id >= m) {
        return absl::InvalidArgumentError(
            absl::StrCat("manual group references unknown op id ", id));
      }
      if (claimed[id]) {
        return absl::InvalidArgumentError(
            absl::StrCat("op id ", id, " appears in two manual groups"));
      }
      claimed[id] = true;
      label[id] = group.front();
    }
  }
  if (!manual_groups.empty()) {
    std::vector<std::set<int>> qsucc(m);
    for (const Edge& e : edges) {
      if (label[e.src] != label[e.dst]) qsucc[label[e.src]].insert(label[e.dst]);
    }
    std::vector<std::vector<int>> q(m);
    for (int i = 0; i < m; ++i) q[i].assign(qsucc[i].begin(), qsucc[i].end());
    std::vector<int> cycle = internal::FindCycle(q);
    if (!cycle.empty()) {
      std::vector<std::string> names;
      for (int v : cycle) names.push_back(ops[v].name);
      return absl::InvalidArgumentError(absl::StrCat(
          "manual groups induce a cycle through groups led by {",
          absl::StrJoin(names, ", "), "}"));
    }
  }

  ComputationGraph g;
  g.ops_ = std::move(ops);
  g.edges_ = std::move(edges);
  g.manual_groups_ = std::move(manual_groups);
  g.out_edges_.resize(m);
  g.in_edges_.resize(m);
  for (int i = 0; i < static_cast<int>(g.edges_.size()); ++i) {
    g.out_edges_[g.edges_[i].src].push_back(i);
    g.in_edges_[g.edges_[i].dst].push_back(i);
  }
  g.topo_order_ = std::move(order);
  return g;
}

double ComputationGraph::TotalCost() const {
  double total = 0.0;
  for (const Operation& op : ops_) total += op.compute_cost;
  return total;
}

int64_t ComputationGraph::TotalParamBytes() const {
  int64_t total = 0;
  for (const Operation& op : ops_) total += op.param_bytes;
  return total;
}

}  // namespace devplace
