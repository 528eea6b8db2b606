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

#ifndef DEVPLACE_EXPERIMENT_H_
#define DEVPLACE_EXPERIMENT_H_

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "devplace/baselines.h"
#include "devplace/grouping.h"
#include "devplace/simulator.h"
#include "devplace/topology.h"
#include "devplace/trainer.h"

namespace devplace {

struct RlStrategy {
  TrainerConfig config;
};

using StrategySpec = std::variant<BaselineKind, RlStrategy>;

std::string StrategyName(const StrategySpec& strategy);

struct ExperimentRow {
  std::string strategy;
  // False when the placement does not fit in memory or when the strategy
  // produced no feasible placement at all (then `placement` is empty).
  bool feasible = false;
  double makespan_seconds = 0.0;
  double search_wall_seconds = 0.0;
  Placement placement;
  SimReport report;
  std::vector<LogEntry> training_log;  // RL rows only
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
};

// Runs every strategy in order. Each recorded placement is simulated again
// and must reproduce its makespan bit for bit, otherwise Internal is returned.
// A strategy that finds nothing feasible yields an infeasible row with an
// empty placement; other strategy errors are returned.
absl::StatusOr<ExperimentResult> RunExperiment(
    const GroupedGraph& gg, const DeviceTopology& topo,
    std::span<const StrategySpec> strategies);

// strategy,makespan_s,feasible,search_wall_s,placement
std::string FormatResultsCsv(const ExperimentResult& result);

// device,busy_s,transfer_s,peak_bytes for one row's placement.
std::string FormatProfileCsv(const ExperimentRow& row);

}  // namespace devplace

#endif  // DEVPLACE_EXPERIMENT_H_
