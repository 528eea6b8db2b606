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

#include "devplace/experiment.h"

#include <chrono>
#include <cstdio>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "devplace/status_macros.h"

namespace devplace {
namespace {

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

absl::StatusOr<ExperimentRow> RunOne(const GroupedGraph& gg,
                                     const DeviceTopology& topo,
                                     const StrategySpec& strategy) {
  ExperimentRow row;
  row.strategy = StrategyName(strategy);
  const auto start = std::chrono::steady_clock::now();
  std::optional<Placement> placement;
  if (const auto* rl = std::get_if<RlStrategy>(&strategy)) {
    ASSIGN_OR_RETURN(TrainResult trained, Train(gg, topo, rl->config));
    row.training_log = std::move(trained.log);
    if (trained.found) placement = std::move(trained.best_placement);
  } else {
    absl::StatusOr<Placement> p =
        RunBaseline(gg, topo, std::get<BaselineKind>(strategy));
    if (p.ok()) {
      placement = *std::move(p);
    } else if (!absl::IsNotFound(p.status())) {
      return p.status();
    }
  }
  row.search_wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (!placement.has_value()) {
    row.feasible = false;
    row.makespan_seconds = std::numeric_limits<double>::infinity();
    return row;
  }
  ASSIGN_OR_RETURN(row.report, Simulate(gg, topo, *placement));
  row.placement = *std::move(placement);
  row.feasible = row.report.feasible;
  row.makespan_seconds = row.report.makespan_seconds;
  return row;
}

}  // namespace

std::string StrategyName(const StrategySpec& strategy) {
  if (std::holds_alternative<RlStrategy>(strategy)) return "rl";
  return BaselineName(std::get<BaselineKind>(strategy));
}

absl::StatusOr<ExperimentResult> RunExperiment(
    const GroupedGraph& gg, const DeviceTopology& topo,
    std::span<const StrategySpec> strategies) {
  ExperimentResult result;
  for (const StrategySpec& strategy : strategies) {
    ASSIGN_OR_RETURN(ExperimentRow row, RunOne(gg, topo, strategy));
    if (row.placement.size() > 0) {
      ASSIGN_OR_RETURN(SimReport replay, Simulate(gg, topo, row.placement));
      if (replay.makespan_seconds != row.makespan_seconds ||
          replay.feasible != row.feasible) {
        return absl::InternalError(absl::StrCat(
            "replay of ", row.strategy, " placement ", row.placement.ToString(),
            " gave ", Num(replay.makespan_seconds), ", recorded ",
            Num(row.makespan_seconds)));
      }
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string FormatResultsCsv(const ExperimentResult& result) {
  std::string out = "strategy,makespan_s,feasible,search_wall_s,placement\n";
  for (const ExperimentRow& r : result.rows) {
    absl::StrAppend(&out, r.strategy, ",", Num(r.makespan_seconds), ",",
                    r.feasible ? 1 : 0, ",", Num(r.search_wall_seconds), ",",
                    r.placement.ToString(), "\n");
  }
  return out;
}

std::string FormatProfileCsv(const ExperimentRow& row) {
  std::string out = "device,busy_s,transfer_s,peak_bytes\n";
  for (size_t d = 0; d < row.report.busy_seconds.size(); ++d) {
    absl::StrAppend(&out, d, ",", Num(row.report.busy_seconds[d]), ",",
                    Num(row.report.transfer_seconds[d]), ",",
                    row.report.peak_bytes[d], "\n");
  }
  return out;
}

}  // namespace devplace
