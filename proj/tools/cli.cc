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

#include "cli.h"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_split.h"
#include "devplace/baselines.h"
#include "devplace/experiment.h"
#include "devplace/generators.h"
#include "devplace/graph.h"
#include "devplace/grouping.h"
#include "devplace/policy.h"
#include "devplace/simulator.h"
#include "devplace/topology.h"
#include "devplace/trainer.h"

namespace devplace::cli {
namespace {

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Common {
  std::string graph;
  std::string topology;
  uint64_t seed = 1;
  std::string out;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("--graph", c.graph, "graph document (JSON)");
  cmd->add_option("--topology", c.topology, "topology document (JSON)");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--out", c.out, "output path (default: standard output)");
}

void AddTrainerFlags(CLI::App* cmd, TrainerConfig& t,
                     std::optional<double>& failing_signal) {
  cmd->add_option("--samples-per-update", t.samples_per_update);
  cmd->add_option("--total-updates", t.total_updates);
  cmd->add_option("--success-only-after", t.success_only_after);
  cmd->add_option("--learning-rate", t.adam.learning_rate);
  cmd->add_option("--adam-beta1", t.adam.beta1);
  cmd->add_option("--adam-beta2", t.adam.beta2);
  cmd->add_option("--adam-epsilon", t.adam.epsilon);
  cmd->add_option("--controllers", t.controllers);
  cmd->add_option("--baseline-decay", t.baseline_decay);
  cmd->add_option("--failing-signal", failing_signal);
  cmd->add_option("--noise-sigma", t.noise_sigma);
  cmd->add_option("--measure-steps", t.measure_steps);
  cmd->add_option("--hidden", t.hidden);
  cmd->add_option("--device-dim", t.device_dim);
  cmd->add_option("--type-dim", t.type_dim);
  cmd->add_option("--shape-slots", t.shape_slots);
  cmd->add_option("--adjacency-slots", t.adjacency_slots);
  cmd->add_option("--init-scale", t.init_scale);
  cmd->add_option("--checkpoint-every", t.checkpoint_every);
  cmd->add_option("--checkpoint-path", t.checkpoint_path);
  cmd->add_flag("--record-wall-time", t.record_wall_time);
}

class Failure {
 public:
  Failure(int code, std::string message)
      : code_(code), message_(std::move(message)) {}
  int code() const { return code_; }
  const std::string& message() const { return message_; }

 private:
  int code_;
  std::string message_;
};

int CodeFor(const absl::Status& s) {
  switch (s.code()) {
    case absl::StatusCode::kNotFound:
      return kExitInfeasible;
    case absl::StatusCode::kInternal:
      return kExitInternal;
    default:
      return kExitUsage;
  }
}

template <typename T>
T Unwrap(absl::StatusOr<T> v) {
  if (!v.ok()) throw Failure(CodeFor(v.status()), std::string(v.status().message()));
  return *std::move(v);
}

GroupedGraph LoadGrouped(const Common& c) {
  if (c.graph.empty()) throw Failure(kExitUsage, "--graph is required");
  absl::StatusOr<ComputationGraph> g = LoadGraph(c.graph);
  if (!g.ok()) throw Failure(kExitUsage, std::string(g.status().message()));
  return CoalesceSoleConsumers(*g);
}

DeviceTopology LoadTopo(const Common& c) {
  if (c.topology.empty()) throw Failure(kExitUsage, "--topology is required");
  absl::StatusOr<DeviceTopology> t = LoadTopology(c.topology);
  if (!t.ok()) throw Failure(kExitUsage, std::string(t.status().message()));
  return *std::move(t);
}

void Emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  f << text;
  if (!f) throw Failure(kExitUsage, "cannot write " + c.out);
}

void PrintResult(std::ostream& out, const std::string& label, const Placement& p,
                 const SimReport& r) {
  out << label << " makespan_s=" << Num(r.makespan_seconds)
      << " feasible=" << (r.feasible ? 1 : 0) << " placement=" << p.ToString()
      << "\n";
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"devplace: device placement search over simulated devices"};
  app.name("devplace");
  app.require_subcommand(1);

  Common common;
  GeneratorSpec gen;
  std::string family = "rnnlm_grid";
  int gpus = 2;
  auto* generate = app.add_subcommand("generate", "write a synthetic graph or topology");
  AddCommon(generate, common);
  generate->add_option("--family", family,
                       "rnnlm_grid, nmt_attention, inception_blocks or topology");
  generate->add_option("--layers", gen.layers);
  generate->add_option("--steps", gen.steps);
  generate->add_option("--target-steps", gen.target_steps);
  generate->add_option("--hidden", gen.hidden);
  generate->add_option("--batch", gen.batch);
  generate->add_option("--vocab", gen.vocab);
  generate->add_option("--blocks", gen.blocks);
  generate->add_option("--branches", gen.branches);
  generate->add_option("--spatial", gen.spatial);
  generate->add_option("--cost-scale", gen.cost_scale);
  generate->add_option("--byte-scale", gen.byte_scale);
  generate->add_option("--gpus", gpus, "gpu count for --family topology");

  TrainerConfig trainer;
  std::optional<double> failing_signal;
  std::string log_path;
  auto* train = app.add_subcommand("train", "train the placement policy");
  AddCommon(train, common);
  AddTrainerFlags(train, trainer, failing_signal);
  train->add_option("--log", log_path, "training log CSV path");

  std::string kind_text;
  auto* baseline = app.add_subcommand("baseline", "run one baseline placer");
  AddCommon(baseline, common);
  baseline->add_option("--kind", kind_text,
                       "single_device:D, expert_contiguous:P, mincut_all_devices, "
                       "mincut_gpu_only, random_search:BUDGET:SEED, brute_force")
      ->required();

  uint64_t cap = kDefaultBruteForceCap;
  auto* bruteforce = app.add_subcommand("bruteforce", "exact optimum by enumeration");
  AddCommon(bruteforce, common);
  bruteforce->add_option("--cap", cap, "maximum number of placements to enumerate");

  std::string strategies_text =
      "single_device:1,expert_contiguous:2,mincut_all_devices,mincut_gpu_only,rl";
  std::string profile_path;
  auto* report = app.add_subcommand("report", "run several strategies and tabulate");
  AddCommon(report, common);
  AddTrainerFlags(report, trainer, failing_signal);
  report->add_option("--strategies", strategies_text, "comma-separated strategy names");
  report->add_option("--profile", profile_path,
                     "per-device profile CSV of the fastest feasible row");

  auto* selftest = app.add_subcommand("selftest", "quick end-to-end consistency check");
  AddCommon(selftest, common);

  std::vector<std::string> argv_store = {"devplace"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) {
      if (family == "topology") {
        if (gpus < 0) throw Failure(kExitUsage, "--gpus must be >= 0");
        Emit(common, SerializeTopology(WorkstationTopology(gpus)), out);
        return kExitOk;
      }
      gen.family = Unwrap(ParseGeneratorFamily(family));
      gen.seed = common.seed;
      Emit(common, SerializeGraph(Unwrap(Generate(gen))), out);
      return kExitOk;
    }

    if (train->parsed()) {
      GroupedGraph gg = LoadGrouped(common);
      DeviceTopology topo = LoadTopo(common);
      trainer.seed = common.seed;
      trainer.failing_signal = failing_signal;
      TrainResult r = Unwrap(Train(gg, topo, trainer));
      const std::string log = FormatTrainingLog(r.log);
      if (!log_path.empty()) {
        Common to_log = common;
        to_log.out = log_path;
        Emit(to_log, log, out);
      }
      if (!r.found) {
        err << "no feasible placement was sampled\n";
        return kExitInfeasible;
      }
      std::ostringstream text;
      PrintResult(text, "rl", r.best_placement, r.best_report);
      Emit(common, text.str(), out);
      return kExitOk;
    }

    if (baseline->parsed()) {
      GroupedGraph gg = LoadGrouped(common);
      DeviceTopology topo = LoadTopo(common);
      BaselineKind kind = Unwrap(ParseBaselineKind(kind_text));
      Placement p;
      if (std::holds_alternative<MincutAllDevices>(kind) ||
          std::holds_alternative<MincutGpuOnly>(kind)) {
        p = Unwrap(PlaceMincut(gg, topo, std::holds_alternative<MincutAllDevices>(kind),
                               common.seed));
      } else {
        p = Unwrap(RunBaseline(gg, topo, kind));
      }
      SimReport r = Unwrap(Simulate(gg, topo, p));
      std::ostringstream text;
      PrintResult(text, BaselineName(kind), p, r);
      Emit(common, text.str(), out);
      return r.feasible ? kExitOk : kExitInfeasible;
    }

    if (bruteforce->parsed()) {
      GroupedGraph gg = LoadGrouped(common);
      DeviceTopology topo = LoadTopo(common);
      BruteForceResult r = Unwrap(BruteForce(gg, topo, cap));
      std::ostringstream text;
      PrintResult(text, "optimal", r.placement, r.report);
      Emit(common, text.str(), out);
      return kExitOk;
    }

    if (report->parsed()) {
      GroupedGraph gg = LoadGrouped(common);
      DeviceTopology topo = LoadTopo(common);
      trainer.seed = common.seed;
      trainer.failing_signal = failing_signal;
      std::vector<StrategySpec> strategies;
      for (absl::string_view name :
           absl::StrSplit(strategies_text, ',', absl::SkipEmpty())) {
        if (name == "rl") {
          strategies.push_back(RlStrategy{trainer});
        } else {
          strategies.push_back(Unwrap(ParseBaselineKind(std::string(name))));
        }
      }
      ExperimentResult result = Unwrap(RunExperiment(gg, topo, strategies));
      Emit(common, FormatResultsCsv(result), out);
      if (!profile_path.empty()) {
        const ExperimentRow* best = nullptr;
        for (const ExperimentRow& row : result.rows) {
          if (row.feasible &&
              (best == nullptr || row.makespan_seconds < best->makespan_seconds)) {
            best = &row;
          }
        }
        if (best == nullptr) throw Failure(kExitInfeasible, "no feasible row to profile");
        Common to_profile = common;
        to_profile.out = profile_path;
        Emit(to_profile, FormatProfileCsv(*best), out);
      }
      return kExitOk;
    }

    if (selftest->parsed()) {
      GeneratorSpec spec;
      spec.layers = 1;
      spec.steps = 1;
      spec.seed = common.seed;
      ComputationGraph g = Unwrap(Generate(spec));
      ComputationGraph again = Unwrap(ParseGraph(SerializeGraph(g)));
      if (SerializeGraph(again) != SerializeGraph(g)) {
        throw Failure(kExitInternal, "graph serialization does not round-trip");
      }
      GroupedGraph gg = CoalesceSoleConsumers(g);
      DeviceTopology topo = WorkstationTopology(2);
      BruteForceResult best = Unwrap(BruteForce(gg, topo));
      for (int d = 0; d < topo.num_devices(); ++d) {
        SimReport single = Unwrap(Simulate(gg, topo, Unwrap(PlaceSingle(gg, topo, d))));
        if (single.feasible && single.makespan_seconds < best.report.makespan_seconds) {
          throw Failure(kExitInternal, "a single-device placement beats the optimum");
        }
      }
      SimReport replay = Unwrap(Simulate(gg, topo, best.placement));
      if (replay.makespan_seconds != best.report.makespan_seconds) {
        throw Failure(kExitInternal, "simulation is not reproducible");
      }
      std::ostringstream text;
      text << "selftest ok groups=" << gg.num_groups() << " placements="
           << best.evaluated << "\n";
      PrintResult(text, "optimal", best.placement, best.report);
      Emit(common, text.str(), out);
      return kExitOk;
    }
  } catch (const Failure& f) {
    err << "devplace: " << f.message() << "\n";
    return f.code();
  }
  return kExitUsage;
}

}  // namespace devplace::cli
