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

#include "devplace/partitioner.h"

#include <algorithm>
#include <cassert>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <utility>

namespace devplace {

void PartitionGraph::AddEdge(int u, int v, double w) {
  for (int side = 0; side < 2; ++side) {
    auto& list = adjacency[u];
    auto it = std::find_if(list.begin(), list.end(),
                           [v](const auto& e) { return e.first == v; });
    if (it == list.end()) {
      list.emplace_back(v, w);
    } else {
      it->second += w;
    }
    std::swap(u, v);
  }
}

PartitionGraph PartitionGraph::WithVertices(std::vector<double> weights) {
  PartitionGraph g;
  g.adjacency.resize(weights.size());
  g.vertex_weight = std::move(weights);
  return g;
}

double CutWeight(const PartitionGraph& graph, const std::vector<int>& part) {
  double cut = 0.0;
  for (int v = 0; v < graph.num_vertices(); ++v) {
    for (const auto& [u, w] : graph.adjacency[v]) {
      if (u > v && part[u] != part[v]) cut += w;
    }
  }
  return cut;
}

namespace {

constexpr int kCoarsestSize = 24;
constexpr int kStallLimit = 64;

// Heavy-edge matching. Returns the coarse graph and fills `fine_to_coarse`.
PartitionGraph Coarsen(const PartitionGraph& g, double weight_limit,
                       std::mt19937_64& rng, std::vector<int>& fine_to_coarse) {
  const int n = g.num_vertices();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> mate(n, -1);
  for (int v : order) {
    if (mate[v] >= 0) continue;
    int best = -1;
    double best_w = -1.0;
    for (const auto& [u, w] : g.adjacency[v]) {
      if (mate[u] >= 0 || u == v) continue;
      if (g.vertex_weight[u] + g.vertex_weight[v] > weight_limit) continue;
      if (w > best_w || (w == best_w && u < best)) {
        best = u;
        best_w = w;
      }
    }
    if (best >= 0) {
      mate[v] = best;
      mate[best] = v;
    } else {
      mate[v] = v;
    }
  }
  fine_to_coarse.assign(n, -1);
  int next = 0;
  for (int v = 0; v < n; ++v) {
    if (fine_to_coarse[v] >= 0) continue;
    fine_to_coarse[v] = next;
    fine_to_coarse[mate[v]] = next;
    ++next;
  }
  std::vector<double> weights(next, 0.0);
  for (int v = 0; v < n; ++v) weights[fine_to_coarse[v]] += g.vertex_weight[v];
  PartitionGraph coarse = PartitionGraph::WithVertices(std::move(weights));
  std::vector<std::map<int, double>> merged(next);
  for (int v = 0; v < n; ++v) {
    for (const auto& [u, w] : g.adjacency[v]) {
      const int cv = fine_to_coarse[v];
      const int cu = fine_to_coarse[u];
      if (u > v && cv != cu) {
        merged[std::min(cv, cu)][std::max(cv, cu)] += w;
      }
    }
  }
  for (int c = 0; c < next; ++c) {
    for (const auto& [d, w] : merged[c]) coarse.AddEdge(c, d, w);
  }
  return coarse;
}

// Incrementally maintained k-way assignment.
class Refiner {
 public:
  Refiner(const PartitionGraph& g, const std::vector<double>& caps)
      : g_(g), caps_(caps), k_(static_cast<int>(caps.size())) {}

  void Load(const std::vector<int>& part) {
    const int n = g_.num_vertices();
    part_ = part;
    load_.assign(k_, 0.0);
    conn_.assign(static_cast<size_t>(n) * k_, 0.0);
    for (int v = 0; v < n; ++v) {
      load_[part_[v]] += g_.vertex_weight[v];
      for (const auto& [u, w] : g_.adjacency[v]) Conn(v, part_[u]) += w;
    }
    cut_ = CutWeight(g_, part_);
  }

  const std::vector<int>& part() const { return part_; }
  const std::vector<double>& load() const { return load_; }
  double cut() const { return cut_; }

  double Overload() const {
    double total = 0.0;
    for (int p = 0; p < k_; ++p) total += std::max(0.0, load_[p] - caps_[p]);
    return total;
  }

  // Moves vertices out of overloaded parts until no move reduces the total
  // overload. May increase the cut.
  void Rebalance() {
    while (Overload() > 0.0) {
      const double before = Overload();
      int best_v = -1, best_q = -1;
      double best_reduction = 0.0, best_gain = 0.0;
      for (int v = 0; v < g_.num_vertices(); ++v) {
        const int p = part_[v];
        if (load_[p] <= caps_[p]) continue;
        const double w = g_.vertex_weight[v];
        for (int q = 0; q < k_; ++q) {
          if (q == p) continue;
          const double after = before - std::max(0.0, load_[p] - caps_[p]) -
                               std::max(0.0, load_[q] - caps_[q]) +
                               std::max(0.0, load_[p] - w - caps_[p]) +
                               std::max(0.0, load_[q] + w - caps_[q]);
          const double reduction = before - after;
          const double gain = Conn(v, q) - Conn(v, p);
          if (reduction > best_reduction ||
              (reduction == best_reduction && best_v >= 0 && gain > best_gain)) {
            best_v = v;
            best_q = q;
            best_reduction = reduction;
            best_gain = gain;
          }
        }
      }
      if (best_v < 0) return;
      Move(best_v, best_q);
    }
  }

  // One Fiduccia-Mattheyses pass: greedily apply the best legal move of each
  // unlocked boundary vertex (negative gains allowed), then roll back to the
  // lowest-cut prefix. The cut never increases.
  std::pair<double, double> Pass() {
    const int n = g_.num_vertices();
    const double start_cut = cut_;
    std::vector<bool> locked(n, false);
    std::vector<std::pair<int, int>> moves;  // (vertex, previous part)
    double best_cut = cut_;
    size_t best_len = 0;
    for (int step = 0; step < n; ++step) {
      int best_v = -1, best_q = -1;
      double best_gain = -std::numeric_limits<double>::infinity();
      for (int v = 0; v < n; ++v) {
        if (locked[v]) continue;
        const int p = part_[v];
        const double w = g_.vertex_weight[v];
        for (int q = 0; q < k_; ++q) {
          if (q == p || Conn(v, q) <= 0.0) continue;
          if (load_[q] + w > caps_[q]) continue;
          const double gain = Conn(v, q) - Conn(v, p);
          if (gain > best_gain) {
            best_gain = gain;
            best_v = v;
            best_q = q;
          }
        }
      }
      if (best_v < 0) break;
      moves.emplace_back(best_v, part_[best_v]);
      Move(best_v, best_q);
      locked[best_v] = true;
      if (cut_ < best_cut) {
        best_cut = cut_;
        best_len = moves.size();
      }
      if (moves.size() - best_len > kStallLimit) break;
    }
    while (moves.size() > best_len) {
      Move(moves.back().first, moves.back().second);
      moves.pop_back();
    }
    cut_ = CutWeight(g_, part_);
    assert(cut_ <= start_cut);
    return {start_cut, cut_};
  }

 private:
  double& Conn(int v, int q) { return conn_[static_cast<size_t>(v) * k_ + q]; }

  void Move(int v, int q) {
    const int p = part_[v];
    if (p == q) return;
    cut_ -= Conn(v, q) - Conn(v, p);
    for (const auto& [u, w] : g_.adjacency[v]) {
      Conn(u, p) -= w;
      Conn(u, q) += w;
    }
    load_[p] -= g_.vertex_weight[v];
    load_[q] += g_.vertex_weight[v];
    part_[v] = q;
  }

  const PartitionGraph& g_;
  const std::vector<double>& caps_;
  const int k_;
  std::vector<int> part_;
  std::vector<double> load_;
  std::vector<double> conn_;
  double cut_ = 0.0;
};

std::vector<int> GrowInitial(const PartitionGraph& g,
                             const std::vector<double>& targets,
                             const std::vector<double>& caps,
                             std::mt19937_64& rng) {
  const int n = g.num_vertices();
  const int k = static_cast<int>(targets.size());
  std::vector<int> part(n, -1);
  std::vector<int> unassigned(n);
  std::iota(unassigned.begin(), unassigned.end(), 0);
  for (int p = 0; p + 1 < k; ++p) {
    double load = 0.0;
    std::vector<double> gain(n, 0.0);
    while (load < targets[p]) {
      int pick = -1;
      for (int v = 0; v < n; ++v) {
        if (part[v] >= 0 || load + g.vertex_weight[v] > caps[p]) continue;
        if (gain[v] > 0.0 && (pick < 0 || gain[v] > gain[pick])) pick = v;
      }
      if (pick < 0) {
        // Frontier exhausted: restart from a random vertex that still fits.
        std::vector<int> fits;
        for (int v = 0; v < n; ++v) {
          if (part[v] < 0 && load + g.vertex_weight[v] <= caps[p]) fits.push_back(v);
        }
        if (fits.empty()) break;
        pick = fits[std::uniform_int_distribution<size_t>(0, fits.size() - 1)(rng)];
      }
      part[pick] = p;
      load += g.vertex_weight[pick];
      for (const auto& [u, w] : g.adjacency[pick]) gain[u] += w;
    }
  }
  for (int v = 0; v < n; ++v) {
    if (part[v] < 0) part[v] = k - 1;
  }
  return part;
}

std::vector<int> PackInitial(const PartitionGraph& g,
                             const std::vector<double>& targets) {
  const int n = g.num_vertices();
  const int k = static_cast<int>(targets.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return g.vertex_weight[a] > g.vertex_weight[b];
  });
  std::vector<double> load(k, 0.0);
  std::vector<int> part(n, 0);
  for (int v : order) {
    int best = 0;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int p = 0; p < k; ++p) {
      if (targets[p] <= 0.0) continue;
      const double ratio = (load[p] + g.vertex_weight[v]) / targets[p];
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best = p;
      }
    }
    part[v] = best;
    load[best] += g.vertex_weight[v];
  }
  return part;
}

void RefineLevel(Refiner& refiner, int max_passes,
                 std::vector<std::pair<double, double>>& log) {
  refiner.Rebalance();
  for (int pass = 0; pass < max_passes; ++pass) {
    const auto [before, after] = refiner.Pass();
    log.emplace_back(before, after);
    if (!(after < before)) break;
  }
}

}  // namespace

PartitionResult MultilevelPartition(const PartitionGraph& graph,
                                    const PartitionOptions& options) {
  const int k = std::max<int>(1, static_cast<int>(options.target_fractions.size()));
  const int n = graph.num_vertices();
  PartitionResult result;
  result.part.assign(n, 0);
  result.part_weight.assign(k, 0.0);

  double total = 0.0;
  for (double w : graph.vertex_weight) total += w;
  std::vector<double> fractions = options.target_fractions;
  if (fractions.empty()) fractions = {1.0};
  const double fraction_sum = std::accumulate(fractions.begin(), fractions.end(), 0.0);
  std::vector<double> targets(k), caps(k);
  for (int p = 0; p < k; ++p) {
    targets[p] = total * fractions[p] / fraction_sum;
    caps[p] = options.imbalance * targets[p];
  }
  if (k == 1 || n == 0) {
    for (int v = 0; v < n; ++v) result.part_weight[0] += graph.vertex_weight[v];
    result.balanced = true;
    return result;
  }

  std::mt19937_64 rng(options.seed);

  // Coarsening.
  std::vector<PartitionGraph> levels;
  std::vector<std::vector<int>> maps;
  const double weight_limit = *std::min_element(targets.begin(), targets.end());
  const PartitionGraph* current = &graph;
  while (current->num_vertices() > std::max(kCoarsestSize, 4 * k)) {
    std::vector<int> map;
    PartitionGraph coarse = Coarsen(*current, weight_limit, rng, map);
    if (coarse.num_vertices() > 0.95 * current->num_vertices()) break;
    levels.push_back(std::move(coarse));
    maps.push_back(std::move(map));
    current = &levels.back();
  }

  // Initial partitions of the coarsest graph; keep the least overloaded, then
  // lowest cut.
  std::vector<int> best_part;
  double best_overload = std::numeric_limits<double>::infinity();
  double best_cut = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> best_log;
  for (int attempt = 0; attempt < std::max(1, options.initial_attempts); ++attempt) {
    std::vector<int> init = attempt == 0 ? PackInitial(*current, targets)
                                         : GrowInitial(*current, targets, caps, rng);
    Refiner refiner(*current, caps);
    refiner.Load(init);
    std::vector<std::pair<double, double>> log;
    RefineLevel(refiner, options.max_refine_passes, log);
    const double overload = refiner.Overload();
    if (overload < best_overload ||
        (overload == best_overload && refiner.cut() < best_cut)) {
      best_overload = overload;
      best_cut = refiner.cut();
      best_part = refiner.part();
      best_log = std::move(log);
    }
  }
  result.refine_passes = std::move(best_log);

  // Uncoarsening with refinement at each finer level.
  std::vector<int> part = std::move(best_part);
  for (int level = static_cast<int>(levels.size()) - 1; level >= 0; --level) {
    const PartitionGraph& finer = level == 0 ? graph : levels[level - 1];
    const std::vector<int>& map = maps[level];
    std::vector<int> projected(finer.num_vertices());
    for (int v = 0; v < finer.num_vertices(); ++v) projected[v] = part[map[v]];
    Refiner refiner(finer, caps);
    refiner.Load(projected);
    RefineLevel(refiner, options.max_refine_passes, result.refine_passes);
    part = refiner.part();
  }

  result.part = std::move(part);
  result.cut = CutWeight(graph, result.part);
  for (int v = 0; v < n; ++v) result.part_weight[result.part[v]] += graph.vertex_weight[v];
  result.balanced = true;
  for (int p = 0; p < k; ++p) {
    if (result.part_weight[p] > caps[p] * (1.0 + 1e-12)) result.balanced = false;
  }
  return result;
}

}  // namespace devplace
