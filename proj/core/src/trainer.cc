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

#include "devplace/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <set>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"
#include "devplace/status_macros.h"
#include "worker_pool.h"

namespace devplace {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t MixSeed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  return SplitMix64(SplitMix64(SplitMix64(seed ^ SplitMix64(a)) ^ b) ^ c);
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double SuggestFailingSignal(const GroupedGraph& gg, const DeviceTopology& topo) {
  return 2.0 * std::sqrt(gg.TotalCost() / topo.SlowestRate());
}

absl::Status ValidateRewardSpec(const RewardSpec& spec, const GroupedGraph& gg,
                                const DeviceTopology& topo) {
  const double bound = std::sqrt(gg.TotalCost() / topo.SlowestRate());
  if (!(spec.failing_signal > 0.0) || !(spec.failing_signal > bound)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "failing signal ", spec.failing_signal,
        " must be positive and exceed sqrt(single slowest device runtime) = ",
        bound));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> RewardOf(const Measurement& measurement,
                                const RewardSpec& spec) {
  if (!measurement.feasible()) return spec.failing_signal;
  const double seconds = measurement.seconds();
  if (!(seconds > 0.0) || !std::isfinite(seconds)) {
    return absl::InvalidArgumentError(
        absl::StrCat("measurement must be positive and finite, got ", seconds));
  }
  return std::sqrt(seconds);
}

BaselineState BaselineState::FromFailingSignal(double failing_signal,
                                               double decay) {
  return BaselineState{failing_signal, decay, true};
}

void BaselineState::Update(double mean_reward) {
  value = decay * value + (1.0 - decay) * mean_reward;
}

absl::StatusOr<ReinforceResult> ReinforceUpdate(
    const PolicyParams& snapshot, const PolicyInputs& inputs,
    std::span<const ScoredSample> samples, BaselineState& baseline) {
  ReinforceResult result;
  if (samples.empty()) return result;
  result.gradient.assign(snapshot.size(), 0.0);
  double reward_sum = 0.0;
  for (const ScoredSample& s : samples) {
    std::vector<double> g;
    if (s.trace != nullptr) {
      g = GradFromTrace(snapshot, *s.trace);
    } else {
      ASSIGN_OR_RETURN(g, GradLogProb(snapshot, inputs, s.placement));
    }
    const double advantage = s.reward - baseline.value;
    for (size_t i = 0; i < g.size(); ++i) result.gradient[i] += advantage * g[i];
    reward_sum += s.reward;
  }
  const double inv_k = 1.0 / static_cast<double>(samples.size());
  for (double& v : result.gradient) v *= inv_k;
  result.samples_used = static_cast<int>(samples.size());
  baseline.Update(reward_sum * inv_k);
  return result;
}

absl::Status ValidateTrainerConfig(const TrainerConfig& config) {
  if (config.samples_per_update < 1) {
    return absl::InvalidArgumentError("samples per update (K) must be >= 1");
  }
  if (config.total_updates < 0) {
    return absl::InvalidArgumentError("total updates must be >= 0");
  }
  if (config.success_only_after < 0) {
    return absl::InvalidArgumentError("success_only_after must be >= 0");
  }
  if (config.controllers < 1) {
    return absl::InvalidArgumentError("need at least one controller");
  }
  if (!(config.baseline_decay >= 0.0 && config.baseline_decay < 1.0)) {
    return absl::InvalidArgumentError("baseline decay must lie in [0, 1)");
  }
  if (config.measure_steps < 2) {
    return absl::InvalidArgumentError("measure_steps must be >= 2");
  }
  if (!(config.noise_sigma >= 0.0)) {
    return absl::InvalidArgumentError("noise sigma must be >= 0");
  }
  if (config.hidden < 1 || config.device_dim < 1 || config.type_dim < 1 ||
      config.shape_slots < 1 || config.adjacency_slots < 1) {
    return absl::InvalidArgumentError("policy dimensions must be >= 1");
  }
  if (!(config.adam.learning_rate > 0.0)) {
    return absl::InvalidArgumentError("learning rate must be positive");
  }
  return absl::OkStatus();
}

std::string FormatTrainingLog(std::span<const LogEntry> log) {
  std::string out =
      "update_index,controller_id,store_version,mean_R,baseline,best_R,"
      "n_feasible_of_K,wall_ms,n_used,n_used_infeasible\n";
  for (const LogEntry& e : log) {
    absl::StrAppend(&out, e.update_index, ",", e.controller_id, ",",
                    e.store_version, ",", FormatDouble(e.mean_reward), ",",
                    FormatDouble(e.baseline), ",", FormatDouble(e.best_reward),
                    ",", e.feasible_of_k, ",", FormatDouble(e.wall_ms), ",",
                    e.samples_used, ",", e.used_infeasible, "\n");
  }
  return out;
}

absl::StatusOr<ControllerResult> RunController(
    int controller_id, ParameterStore& store, const TrainingProblem& problem,
    const TrainerConfig& config,
    const std::function<void(const LogEntry&)>& on_entry) {
  RETURN_IF_ERROR(ValidateTrainerConfig(config));
  const int k = config.samples_per_update;
  const GroupedGraph& gg = *problem.graph;
  const DeviceTopology& topo = *problem.topology;
  const PolicyInputs& inputs = *problem.inputs;

  std::mt19937_64 rng(MixSeed(config.seed, 0xC0117201ULL, controller_id));
  BaselineState baseline = BaselineState::FromFailingSignal(
      problem.reward.failing_signal, config.baseline_decay);
  ControllerResult result;
  result.best_reward = problem.reward.failing_signal;
  internal::WorkerPool workers(k);

  PolicyParams params(problem.shape);
  for (int update = 0; update < config.total_updates; ++update) {
    const auto started = std::chrono::steady_clock::now();

    // Phase 1: sample K placements from one parameter snapshot.
    const ParameterStore::Snapshot snapshot = store.Read();
    RETURN_IF_ERROR(params.SetFlat(*snapshot.values));
    std::vector<ScoredSample> samples(k);
    for (int i = 0; i < k; ++i) {
      SampledPlacement s = ForwardSample(params, inputs, rng);
      samples[i].placement = std::move(s.placement);
      samples[i].log_prob = s.log_prob;
      samples[i].trace = std::move(s.trace);
    }

    // Phase 2: one worker per sample measures its runtime. A failed
    // evaluation counts as an infeasible placement.
    workers.RunBatch(k, [&](int i) {
      NoiseSpec noise{config.noise_sigma,
                      MixSeed(config.seed, controller_id + 1, update, i)};
      auto measured = Measure(gg, topo, samples[i].placement, noise,
                              config.measure_steps);
      absl::StatusOr<double> reward = absl::UnknownError("unevaluated");
      if (measured.ok()) reward = RewardOf(*measured, problem.reward);
      samples[i].feasible = reward.ok() && measured->feasible();
      samples[i].reward = samples[i].feasible ? *reward
                                              : problem.reward.failing_signal;
    });

    LogEntry entry;
    entry.update_index = update;
    entry.controller_id = controller_id;
    double reward_sum = 0.0;
    for (const ScoredSample& s : samples) {
      reward_sum += s.reward;
      if (!s.feasible) continue;
      ++entry.feasible_of_k;
      if (!result.best_placement.has_value() || s.reward < result.best_reward) {
        result.best_placement = s.placement;
        result.best_reward = s.reward;
      }
    }
    entry.mean_reward = reward_sum / k;

    const bool success_only = update >= config.success_only_after;
    std::vector<ScoredSample> used;
    for (ScoredSample& s : samples) {
      if (s.feasible || !success_only) used.push_back(std::move(s));
    }
    for (const ScoredSample& s : used) {
      if (!s.feasible) ++entry.used_infeasible;
    }
    ASSIGN_OR_RETURN(ReinforceResult step,
                     ReinforceUpdate(params, inputs, used, baseline));
    entry.samples_used = step.samples_used;
    entry.store_version = snapshot.version;
    if (step.samples_used > 0) {
      // Descend: J is an expected root-runtime and is minimized.
      auto version = store.ApplyAdam(step.gradient);
      entry.store_version = version.ok() ? *version : store.version();
    }
    entry.baseline = baseline.value;
    entry.best_reward = result.best_reward;
    if (config.record_wall_time) {
      entry.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - started)
                          .count();
    }
    if (on_entry) on_entry(entry);
    result.log.push_back(entry);

    if (config.checkpoint_every > 0 && controller_id == 0 &&
        !config.checkpoint_path.empty() && problem.embedding != nullptr &&
        (update + 1) % config.checkpoint_every == 0) {
      PolicyParams latest(problem.shape);
      RETURN_IF_ERROR(latest.SetFlat(*store.Read().values));
      RETURN_IF_ERROR(
          SaveCheckpoint(config.checkpoint_path, latest, *problem.embedding));
    }
  }
  return result;
}

absl::StatusOr<TrainResult> Train(const GroupedGraph& gg,
                                  const DeviceTopology& topo,
                                  const TrainerConfig& config) {
  RETURN_IF_ERROR(ValidateTrainerConfig(config));
  if (gg.num_groups() == 0) {
    return absl::InvalidArgumentError("graph has no groups to place");
  }

  TrainResult out;
  std::set<std::string> types;
  for (const Group& g : gg.groups()) {
    for (const auto& [type, count] : g.type_counts) types.insert(type);
  }
  out.embedding.type_dim = config.type_dim;
  out.embedding.shape_slots = config.shape_slots;
  out.embedding.adjacency_slots = config.adjacency_slots;
  int next = 1;
  for (const std::string& t : types) out.embedding.type_vocab[t] = next++;

  const PolicyInputs inputs = EmbedGroups(gg, out.embedding);
  out.reward.failing_signal =
      config.failing_signal.value_or(SuggestFailingSignal(gg, topo));
  RETURN_IF_ERROR(ValidateRewardSpec(out.reward, gg, topo));

  TrainingProblem problem;
  problem.graph = &gg;
  problem.topology = &topo;
  problem.inputs = &inputs;
  problem.embedding = &out.embedding;
  problem.shape = ShapeFor(out.embedding, topo.num_devices(), config.hidden,
                           config.device_dim);
  problem.reward = out.reward;

  const PolicyParams initial =
      PolicyParams::RandomUniform(problem.shape, config.seed, config.init_scale);
  ParameterStore store(
      std::vector<double>(initial.flat().begin(), initial.flat().end()),
      config.adam);

  std::vector<absl::StatusOr<ControllerResult>> results;
  if (config.controllers == 1) {
    results.push_back(RunController(0, store, problem, config));
    if (results[0].ok()) out.log = results[0]->log;
  } else {
    std::mutex log_mu;
    auto append = [&](const LogEntry& e) {
      std::lock_guard<std::mutex> lock(log_mu);
      out.log.push_back(e);
    };
    results.resize(config.controllers, absl::UnknownError("not run"));
    std::vector<std::thread> threads;
    for (int c = 0; c < config.controllers; ++c) {
      threads.emplace_back([&, c] {
        results[c] = RunController(c, store, problem, config, append);
      });
    }
    for (std::thread& t : threads) t.join();
  }

  for (const auto& r : results) {
    if (!r.ok()) return r.status();
    if (!r->best_placement.has_value()) continue;
    if (!out.found || r->best_reward < out.best_reward) {
      out.found = true;
      out.best_reward = r->best_reward;
      out.best_placement = *r->best_placement;
    }
  }
  if (!out.found) out.best_reward = out.reward.failing_signal;
  if (out.found) {
    ASSIGN_OR_RETURN(out.best_report, Simulate(gg, topo, out.best_placement));
  }
  const ParameterStore::Snapshot final_snapshot = store.Read();
  out.final_params = *final_snapshot.values;
  out.rejected_updates = store.rejected_updates();
  return out;
}

}  // namespace devplace
