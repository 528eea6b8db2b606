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

#include <cmath>
#include <sstream>

#include "devplace/baselines.h"
#include "gtest/gtest.h"
#include "support/test_util.h"

namespace devplace {
namespace {

using ::devplace::testing::MakeOps;
using ::devplace::testing::MustCreate;
using ::devplace::testing::OpSpec;
using ::devplace::testing::OpsWithCosts;
using ::devplace::testing::Singletons;
using ::devplace::testing::UniformTopology;

GroupedGraph Tiny() {
  return Singletons(MustCreate(OpsWithCosts({2.0, 3.0, 1.0, 2.0}),
                               {{0, 1, 8}, {0, 2, 4}, {2, 3, 8}}));
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(ExperimentTest, BruteForceDominatesSingle) {
  GroupedGraph gg = Tiny();
  DeviceTopology topo = UniformTopology({1.0, 1.0}, 16.0);
  const StrategySpec strategies[] = {BaselineKind{SingleDevice{0}},
                                     BaselineKind{BruteForceSearch{}}};
  ASSERT_OK_AND_ASSIGN(ExperimentResult r, RunExperiment(gg, topo, strategies));
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].strategy, "single_device:0");
  EXPECT_EQ(r.rows[1].strategy, "brute_force");
  EXPECT_TRUE(r.rows[0].feasible);
  EXPECT_TRUE(r.rows[1].feasible);
  EXPECT_EQ(r.rows[0].makespan_seconds, 8.0);
  EXPECT_LE(r.rows[1].makespan_seconds, r.rows[0].makespan_seconds);
}

TEST(ExperimentTest, EmptyStrategyListIsHeaderOnly) {
  ASSERT_OK_AND_ASSIGN(
      ExperimentResult r,
      RunExperiment(Tiny(), UniformTopology({1.0}, 1.0), {}));
  EXPECT_TRUE(r.rows.empty());
  EXPECT_EQ(FormatResultsCsv(r),
            "strategy,makespan_s,feasible,search_wall_s,placement\n");
}

TEST(ExperimentTest, RowsReplayBitExactly) {
  GroupedGraph gg = Tiny();
  DeviceTopology topo = UniformTopology({1.0, 2.0, 0.5}, 4.0);
  TrainerConfig rl;
  rl.total_updates = 30;
  rl.success_only_after = 0;
  rl.hidden = 8;
  rl.device_dim = 4;
  const StrategySpec strategies[] = {
      BaselineKind{SingleDevice{1}}, BaselineKind{ExpertContiguous{2}},
      BaselineKind{MincutAllDevices{}}, BaselineKind{MincutGpuOnly{}},
      BaselineKind{RandomSearch{20, 4}}, BaselineKind{BruteForceSearch{}},
      RlStrategy{rl}};
  ASSERT_OK_AND_ASSIGN(ExperimentResult r, RunExperiment(gg, topo, strategies));
  ASSERT_EQ(r.rows.size(), 7u);
  for (const ExperimentRow& row : r.rows) {
    ASSERT_EQ(row.placement.size(), gg.num_groups()) << row.strategy;
    ASSERT_OK_AND_ASSIGN(SimReport again, Simulate(gg, topo, row.placement));
    EXPECT_EQ(again.makespan_seconds, row.makespan_seconds) << row.strategy;
    EXPECT_GE(row.search_wall_seconds, 0.0);
    EXPECT_GE(row.makespan_seconds, r.rows[5].makespan_seconds) << row.strategy;
  }
  EXPECT_EQ(r.rows[6].strategy, "rl");
  EXPECT_EQ(r.rows[6].training_log.size(), 30u);
  EXPECT_TRUE(r.rows[0].training_log.empty());
}

TEST(ExperimentTest, RlOnSmallInstanceMatchesBruteForce) {
  GroupedGraph gg = Singletons(
      MustCreate(OpsWithCosts({4.0, 2.0, 2.0}), {}));
  DeviceTopology topo = UniformTopology({1.0, 1.0}, 1.0);
  TrainerConfig rl;
  rl.total_updates = 200;
  rl.success_only_after = 0;
  rl.hidden = 8;
  rl.device_dim = 4;
  rl.adam.learning_rate = 0.01;
  int matched = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    rl.seed = seed;
    const StrategySpec strategies[] = {BaselineKind{BruteForceSearch{}},
                                       RlStrategy{rl}};
    ASSERT_OK_AND_ASSIGN(ExperimentResult r,
                         RunExperiment(gg, topo, strategies));
    if (r.rows[1].makespan_seconds == r.rows[0].makespan_seconds) ++matched;
  }
  EXPECT_GE(matched, 9);
}

TEST(ExperimentTest, NothingFeasibleGivesInfeasibleRow) {
  std::vector<OpSpec> specs = {{1.0, 64}, {1.0, 64}};
  GroupedGraph gg = Singletons(MustCreate(MakeOps(specs), {}));
  DeviceTopology topo = UniformTopology({1.0, 1.0}, 1.0, 1);
  TrainerConfig rl;
  rl.total_updates = 3;
  rl.hidden = 4;
  const StrategySpec strategies[] = {BaselineKind{SingleDevice{0}},
                                     BaselineKind{BruteForceSearch{}},
                                     BaselineKind{RandomSearch{5, 1}},
                                     RlStrategy{rl}};
  ASSERT_OK_AND_ASSIGN(ExperimentResult r, RunExperiment(gg, topo, strategies));
  ASSERT_EQ(r.rows.size(), 4u);
  // The single-device placement exists but does not fit.
  EXPECT_FALSE(r.rows[0].feasible);
  EXPECT_EQ(r.rows[0].placement, (Placement{{0, 0}}));
  for (int i = 1; i < 4; ++i) {
    EXPECT_FALSE(r.rows[i].feasible);
    EXPECT_EQ(r.rows[i].placement.size(), 0);
    EXPECT_TRUE(std::isinf(r.rows[i].makespan_seconds));
  }
  const std::vector<std::string> lines = Lines(FormatResultsCsv(r));
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[2].substr(0, 16), "brute_force,inf,");
}

TEST(ExperimentTest, ErrorsPropagate) {
  GroupedGraph gg = Tiny();
  DeviceTopology topo = UniformTopology({1.0, 1.0}, 1.0);
  const StrategySpec bad[] = {BaselineKind{SingleDevice{5}}};
  EXPECT_FALSE(RunExperiment(gg, topo, bad).ok());
}

TEST(ExperimentTest, CsvFormats) {
  GroupedGraph gg = Tiny();
  DeviceTopology topo = UniformTopology({1.0, 1.0}, 16.0);
  const StrategySpec strategies[] = {BaselineKind{SingleDevice{1}}};
  ASSERT_OK_AND_ASSIGN(ExperimentResult r, RunExperiment(gg, topo, strategies));
  const std::vector<std::string> lines = Lines(FormatResultsCsv(r));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[1].substr(0, 20), "single_device:1,8,1,");
  EXPECT_EQ(lines[1].substr(lines[1].rfind(',')), ",1-1-1-1");

  const std::vector<std::string> profile = Lines(FormatProfileCsv(r.rows[0]));
  ASSERT_EQ(profile.size(), 3u);
  EXPECT_EQ(profile[0], "device,busy_s,transfer_s,peak_bytes");
  EXPECT_EQ(profile[1], "0,0,0,0");
  // Device 1 holds everything: 20 bytes of outputs, no parameters.
  EXPECT_EQ(profile[2], "1,8,0,20");
}

}  // namespace
}  // namespace devplace
