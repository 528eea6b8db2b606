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

#ifndef DEVPLACE_GROUPING_H_
#define DEVPLACE_GROUPING_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "devplace/graph.h"

namespace devplace {

// A co-location group: a set of operations that is always placed on a single
// device. Aggregates are sums over the member ops.
struct Group {
  std::vector<int> members;  // ascending op ids
  double compute_cost = 0.0;
  int64_t param_bytes = 0;
  // Sum of tensor_bytes over all edges produced by member ops (internal edges
  // included); feeds the static memory bound.
  int64_t output_bytes = 0;
  // Element counts of member outputs that leave the group.
  std::vector<int64_t> output_elements;
  std::map<std::string, int> type_counts;
};

struct GroupEdge {
  int src = 0;
  int dst = 0;
  int64_t tensor_bytes = 0;
};

// The coarsened graph that placement operates on. Group ids are ordered by the
// smallest member op id, so "ascending group id" and "ascending smallest member
// id" coincide.
class GroupedGraph {
 public:
  // Builds the quotient of `graph` under `membership` (op id -> any label).
  // Labels are renumbered; fails if the quotient graph has a cycle.
  static absl::StatusOr<GroupedGraph> FromPartition(
      const ComputationGraph& graph, const std::vector<int>& membership);

  GroupedGraph() = default;

  int num_groups() const { return static_cast<int>(groups_.size()); }
  const std::vector<Group>& groups() const { return groups_; }
  const Group& group(int id) const { return groups_[id]; }
  const std::vector<GroupEdge>& group_edges() const { return group_edges_; }
  // op id -> group id.
  const std::vector<int>& membership() const { return membership_; }

  const std::vector<int>& out_edges(int group) const {
    return out_edges_[group];
  }
  const std::vector<int>& in_edges(int group) const { return in_edges_[group]; }

  // Topological order, ties broken by smallest member op id.
  const std::vector<int>& topo_order() const { return topo_order_; }
  // Position of each group in topo_order().
  const std::vector<int>& topo_rank() const { return topo_rank_; }

  double TotalCost() const;
  int64_t TotalParamBytes() const;

 private:
  std::vector<Group> groups_;
  std::vector<GroupEdge> group_edges_;
  std::vector<int> membership_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<std::vector<int>> in_edges_;
  std::vector<int> topo_order_;
  std::vector<int> topo_rank_;
};

struct CoalesceOptions {
  // Unset: candidates are visited in ascending group order each sweep.
  // Set: each sweep visits candidates in an order shuffled by this seed.
  std::optional<uint64_t> shuffle_seed;
};

// Seeds groups from the graph's manual groups, then repeatedly merges any
// group whose out-edges all target one other group into that group, until no
// merge applies.
GroupedGraph CoalesceSoleConsumers(const ComputationGraph& graph,
                                   const CoalesceOptions& options = {});

// Group ids in topological order (same as gg.topo_order()).
std::vector<int> TopoOrder(const GroupedGraph& gg);

// Views a grouped graph as a plain graph with one op per group.
ComputationGraph GroupedAsGraph(const GroupedGraph& gg);

}  // namespace devplace

#endif  // DEVPLACE_GROUPING_H_
