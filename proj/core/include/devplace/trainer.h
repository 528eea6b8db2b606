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

#ifndef DEVPLACE_TRAINER_H_
#define DEVPLACE_TRAINER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "devplace/grouping.h"
#include "devplace/parameter_store.h"
#include "devplace/policy.h"
#include "devplace/simulator.h"
#include "devplace/topology.h"

namespace devplace {

// R(P) = sqrt(runtime) for placements that run; `failing_signal` otherwise.
struct RewardSpec {
  double failing_signal = 0.0;
};

// 2 * sqrt(total cost / slowest device rate).
double SuggestFailingSignal(const GroupedGraph& gg, const DeviceTopology& topo);

// The failing signal must be positive and exceed sqrt of the all-on-slowest
// device runtime.
absl::Status ValidateRewardSpec(const RewardSpec& spec, const GroupedGraph& gg,
                                const DeviceTopology& topo);

absl::StatusOr<double> RewardOf(const Measurement& measurement,
                                const RewardSpec& spec);

// Exponential moving average of rewards: B <- decay * B + (1 - decay) * r.
struct BaselineState {
  double value = 0.0;
  double decay = 0.9;
  bool initialized_from_failing_signal = false;

  static BaselineState FromFailingSignal(double failing_signal,
                                         double decay = 0.9);
  void Update(double mean_reward);
};

// One evaluated policy sample.
struct ScoredSample {
  Placement placement;
  double log_prob = 0.0;
  double reward = 0.0;
  bool feasible = false;
  // Optional cached forward pass; recomputed from the placement when null.
  std::shared_ptr<const PolicyTrace> trace;
};

struct ReinforceResult {
  // Mean over samples of (R_i - B) * grad log p(P_i); empty when no samples.
  std::vector<double> gradient;
  int samples_used = 0;
};

// Policy-gradient estimate for the surviving samples, using the baseline
// before it is refreshed; then refreshes the baseline with their mean reward.
// A no-op (empty gradient, baseline untouched) when `samples` is empty.
absl::StatusOr<ReinforceResult> ReinforceUpdate(
    const PolicyParams& snapshot, const PolicyInputs& inputs,
    std::span<const ScoredSample> samples, BaselineState& baseline);

struct TrainerConfig {
  int samples_per_update = 4;  // K; also the number of workers per controller
  int total_updates = 1000;    // per controller
  // From this update index on, infeasible samples never reach the gradient.
  int success_only_after = 5000;
  AdamOptions adam;
  uint64_t seed = 1;
  int controllers = 1;
  double baseline_decay = 0.9;
  std::optional<double> failing_signal;  // default: SuggestFailingSignal
  double noise_sigma = 0.0;
  int measure_steps = 10;

  int hidden = 64;
  int device_dim = 16;
  int type_dim = 16;
  int shape_slots = 8;
  int adjacency_slots = 64;
  double init_scale = 0.1;

  // Log rows carry wall_ms = 0 unless set, which keeps logs byte-identical
  // across runs.
  bool record_wall_time = false;
  int checkpoint_every = 0;  // 0 disables
  std::string checkpoint_path;
};

absl::Status ValidateTrainerConfig(const TrainerConfig& config);

struct LogEntry {
  int update_index = 0;
  int controller_id = 0;
  int64_t store_version = 0;
  double mean_reward = 0.0;
  double baseline = 0.0;
  double best_reward = 0.0;  // best feasible R so far; failing signal if none
  int feasible_of_k = 0;
  int samples_used = 0;
  int used_infeasible = 0;
  double wall_ms = 0.0;
};

// CSV with header update_index,controller_id,store_version,mean_R,baseline,
// best_R,n_feasible_of_K,wall_ms,n_used,n_used_infeasible.
std::string FormatTrainingLog(std::span<const LogEntry> log);

// Immutable inputs every controller reads.
struct TrainingProblem {
  const GroupedGraph* graph = nullptr;
  const DeviceTopology* topology = nullptr;
  const PolicyInputs* inputs = nullptr;
  const EmbeddingSpec* embedding = nullptr;  // used for checkpoints
  PolicyShape shape;
  RewardSpec reward;
};

struct ControllerResult {
  std::optional<Placement> best_placement;
  double best_reward = 0.0;
  std::vector<LogEntry> log;
};

// Runs `config.total_updates` rounds of: snapshot the store, sample K
// placements, evaluate them on K concurrent workers, and apply the REINFORCE
// update. `on_entry`, when set, observes each log row as it is produced.
absl::StatusOr<ControllerResult> RunController(
    int controller_id, ParameterStore& store, const TrainingProblem& problem,
    const TrainerConfig& config,
    const std::function<void(const LogEntry&)>& on_entry = {});

struct TrainResult {
  bool found = false;  // false: no feasible placement was ever sampled
  Placement best_placement;
  SimReport best_report;
  double best_reward = 0.0;
  RewardSpec reward;
  std::vector<LogEntry> log;  // rows in completion order
  std::vector<double> final_params;
  EmbeddingSpec embedding;
  int64_t rejected_updates = 0;
};

// Trains `config.controllers` controllers against one shared store.
absl::StatusOr<TrainResult> Train(const GroupedGraph& gg,
                                  const DeviceTopology& topo,
                                  const TrainerConfig& config);

}  // namespace devplace

#endif  // DEVPLACE_TRAINER_H_
