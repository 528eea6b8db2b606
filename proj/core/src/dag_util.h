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

#ifndef DEVPLACE_SRC_DAG_UTIL_H_
#define DEVPLACE_SRC_DAG_UTIL_H_

#include <algorithm>
#include <functional>
#include <queue>
#include <vector>

namespace devplace::internal {

// Kahn's algorithm over `succ`, always emitting the smallest ready node id.
// Returns fewer than n ids when the graph has a cycle.
inline std::vector<int> MinHeapTopoSort(
    const std::vector<std::vector<int>>& succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> indegree(n, 0);
  for (const auto& s : succ) {
    for (int v : s) ++indegree[v];
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int u = ready.top();
    ready.pop();
    order.push_back(u);
    for (int v : succ[u]) {
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  return order;
}

// Returns one directed cycle (node ids in traversal order) among the nodes
// that a topological sort could not emit. Empty if the graph is acyclic.
inline std::vector<int> FindCycle(const std::vector<std::vector<int>>& succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> order = MinHeapTopoSort(succ);
  if (static_cast<int>(order.size()) == n) return {};
  std::vector<bool> emitted(n, false);
  for (int v : order) emitted[v] = true;
  // Every remaining node has a remaining predecessor; walk backwards until a
  // node repeats.
  std::vector<std::vector<int>> pred(n);
  for (int u = 0; u < n; ++u) {
    for (int v : succ[u]) pred[v].push_back(u);
  }
  int start = 0;
  while (emitted[start]) ++start;
  std::vector<int> seen_at(n, -1);
  std::vector<int> walk;
  int cur = start;
  while (seen_at[cur] < 0) {
    seen_at[cur] = static_cast<int>(walk.size());
    walk.push_back(cur);
    for (int p : pred[cur]) {
      if (!emitted[p]) {
        cur = p;
        break;
      }
    }
  }
  std::vector<int> cycle(walk.begin() + seen_at[cur], walk.end());
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace devplace::internal

#endif  // DEVPLACE_SRC_DAG_UTIL_H_
