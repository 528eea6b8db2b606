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

#ifndef DEVPLACE_GRAPH_H_
#define DEVPLACE_GRAPH_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace devplace {

// A single node of a computational graph. `compute_cost` is expressed in
// seconds on a device of rate 1.0; `output_shape` is the element shape of the
// op's output tensor (empty when the op produces no tensor).
struct Operation {
  int id = 0;
  std::string name;
  std::string type;
  double compute_cost = 0.0;
  std::vector<int64_t> output_shape;
  int64_t param_bytes = 0;

  // Product of `output_shape`, or 0 when the op has no output tensor.
  int64_t OutputElements() const;
};

struct Edge {
  int src = 0;
  int dst = 0;
  int64_t tensor_bytes = 0;
};

// Validated DAG of operations. Instances are immutable once created and can be
// shared read-only across threads.
class ComputationGraph {
 public:
  // Validates and builds a graph. `ops` must carry dense ids 0..M-1 (any
  // order). Fails on dangling edge endpoints, self loops, negative quantities,
  // cycles (one offending cycle is named in the message), and on manual groups
  // that overlap or whose quotient graph is cyclic.
  static absl::StatusOr<ComputationGraph> Create(
      std::vector<Operation> ops, std::vector<Edge> edges,
      std::vector<std::vector<int>> manual_groups = {});

  ComputationGraph() = default;

  int num_ops() const { return static_cast<int>(ops_.size()); }
  const std::vector<Operation>& ops() const { return ops_; }
  const Operation& op(int id) const { return ops_[id]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::vector<int>>& manual_groups() const {
    return manual_groups_;
  }

  // Edge indices leaving / entering `op`, in edge-list order.
  const std::vector<int>& out_edges(int op) const { return out_edges_[op]; }
  const std::vector<int>& in_edges(int op) const { return in_edges_[op]; }

  // Topological order with ties broken by ascending op id.
  const std::vector<int>& topo_order() const { return topo_order_; }

  double TotalCost() const;
  int64_t TotalParamBytes() const;

 private:
  std::vector<Operation> ops_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> manual_groups_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<std::vector<int>> in_edges_;
  std::vector<int> topo_order_;
};

// Reads the graph document format:
//   {"ops": [{"id", "name", "type", "cost", "output_shape", "param_bytes"}],
//    "edges": [{"src", "dst", "bytes"}],
//    "manual_groups": [[id, ...], ...]}            (optional)
absl::StatusOr<ComputationGraph> ParseGraph(std::string_view json_text);
absl::StatusOr<ComputationGraph> LoadGraph(const std::string& path);

// Canonical serialization; ParseGraph(SerializeGraph(g)) reproduces g.
std::string SerializeGraph(const ComputationGraph& graph);

}  // namespace devplace

#endif  // DEVPLACE_GRAPH_H_
