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

#ifndef DEVPLACE_PARTITIONER_H_
#define DEVPLACE_PARTITIONER_H_

#include <cstdint>
#include <utility>
#include <vector>

namespace devplace {

// Undirected weighted graph handed to the partitioner.
struct PartitionGraph {
  std::vector<double> vertex_weight;
  // Symmetric adjacency; parallel edges are merged by the builder.
  std::vector<std::vector<std::pair<int, double>>> adjacency;

  int num_vertices() const { return static_cast<int>(vertex_weight.size()); }

  // Adds w to the undirected edge {u, v}; u != v.
  void AddEdge(int u, int v, double w);
  static PartitionGraph WithVertices(std::vector<double> weights);
};

struct PartitionOptions {
  // Share of the total vertex weight each part should receive; normalized
  // internally. Its size is the number of parts.
  std::vector<double> target_fractions;
  // A part may hold up to imbalance * its target weight.
  double imbalance = 1.10;
  uint64_t seed = 0;
  int max_refine_passes = 8;
  int initial_attempts = 8;
};

struct PartitionResult {
  std::vector<int> part;
  double cut = 0.0;
  std::vector<double> part_weight;
  // False when no assignment within the caps was found (e.g. one vertex is
  // heavier than a part's cap); the result is then the least-overloaded one.
  bool balanced = true;
  // Cut before and after every refinement pass at every level, in order.
  std::vector<std::pair<double, double>> refine_passes;
};

double CutWeight(const PartitionGraph& graph, const std::vector<int>& part);

// Multilevel k-way partitioning: heavy-edge matching coarsening, several
// seeded initial partitions of the coarsest graph (greedy graph growing and
// longest-processing-time packing), then Fiduccia-Mattheyses refinement with
// best-prefix rollback at each level while projecting back.
PartitionResult MultilevelPartition(const PartitionGraph& graph,
                                    const PartitionOptions& options);

}  // namespace devplace

#endif  // DEVPLACE_PARTITIONER_H_
