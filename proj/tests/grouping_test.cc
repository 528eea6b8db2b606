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

#include "devplace/grouping.h"

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "support/test_util.h"

namespace devplace {
namespace {

using ::devplace::testing::MustCreate;
using ::devplace::testing::OpsWithCosts;
using ::devplace::testing::RandomDag;

std::set<std::vector<int>> Partition(const GroupedGraph& gg) {
  std::set<std::vector<int>> out;
  for (const Group& g : gg.groups()) out.insert(g.members);
  return out;
}

TEST(CoalesceTest, ChainCollapses) {
  auto g = MustCreate(OpsWithCosts({1, 1, 1}), {{0, 1, 4}, {1, 2, 4}});
  GroupedGraph gg = CoalesceSoleConsumers(g);
  EXPECT_EQ(Partition(gg), (std::set<std::vector<int>>{{0, 1, 2}}));
}

TEST(CoalesceTest, DiamondCollapses) {
  auto g = MustCreate(OpsWithCosts({1, 1, 1, 1}),
                      {{0, 1, 4}, {0, 2, 4}, {1, 3, 4}, {2, 3, 4}});
  GroupedGraph gg = CoalesceSoleConsumers(g);
  EXPECT_EQ(Partition(gg), (std::set<std::vector<int>>{{0, 1, 2, 3}}));
}

TEST(CoalesceTest, ForkStaysApart) {
  auto g = MustCreate(OpsWithCosts({1, 1, 1}), {{0, 1, 4}, {0, 2, 4}});
  GroupedGraph gg = CoalesceSoleConsumers(g);
  EXPECT_EQ(Partition(gg), (std::set<std::vector<int>>{{0}, {1}, {2}}));
}

TEST(CoalesceTest, ManualGroupsSeedTheMerge) {
  // 0 -> {1, 2} with 1 and 2 forced together: 0 then has a single consumer.
  auto g = MustCreate(OpsWithCosts({1, 1, 1, 1}), {{0, 1, 4}, {0, 2, 4}, {3, 2, 1}},
                      {{1, 2}});
  GroupedGraph gg = CoalesceSoleConsumers(g);
  EXPECT_EQ(Partition(gg), (std::set<std::vector<int>>{{0, 1, 2, 3}}));
}

TEST(CoalesceTest, ZeroByteEdgesStillCountAsConsumers) {
  auto g = MustCreate(OpsWithCosts({1, 1, 1}), {{0, 1, 0}, {0, 2, 8}});
  GroupedGraph gg = CoalesceSoleConsumers(g);
  EXPECT_EQ(gg.num_groups(), 3);
}

TEST(CoalesceTest, ConservesCostAndParams) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    // Dyadic costs keep every summation order exact.
    ComputationGraph base = RandomDag(rng, 20, 0.15);
    std::vector<Operation> ops = base.ops();
    for (Operation& op : ops) op.compute_cost = static_cast<double>(rng() % 64) / 8.0;
    auto g = MustCreate(ops, base.edges());
    GroupedGraph gg = CoalesceSoleConsumers(g);
    EXPECT_EQ(gg.TotalCost(), g.TotalCost());
    EXPECT_EQ(gg.TotalParamBytes(), g.TotalParamBytes());
    int members = 0;
    for (const Group& grp : gg.groups()) members += static_cast<int>(grp.members.size());
    EXPECT_EQ(members, g.num_ops());
    for (const GroupEdge& e : gg.group_edges()) EXPECT_NE(e.src, e.dst);
  }
}

TEST(CoalesceTest, FixedPointReached) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    GroupedGraph gg = CoalesceSoleConsumers(RandomDag(rng, 25, 0.12));
    for (int grp = 0; grp < gg.num_groups(); ++grp) {
      std::set<int> targets;
      for (int ei : gg.out_edges(grp)) targets.insert(gg.group_edges()[ei].dst);
      EXPECT_NE(targets.size(), 1u) << "group " << grp << " can still merge";
    }
  }
}

TEST(CoalesceTest, ConfluentAcrossVisitOrders) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 30);
  std::uniform_real_distribution<double> density(0.02, 0.3);
  for (int trial = 0; trial < 200; ++trial) {
    ComputationGraph g = RandomDag(rng, size(rng), density(rng));
    const auto reference = Partition(CoalesceSoleConsumers(g));
    for (uint64_t order = 1; order <= 5; ++order) {
      CoalesceOptions opts;
      opts.shuffle_seed = order * 7919 + trial;
      EXPECT_EQ(Partition(CoalesceSoleConsumers(g, opts)), reference)
          << "trial " << trial << " order " << order;
    }
  }
}

TEST(CoalesceTest, Idempotent) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    GroupedGraph once = CoalesceSoleConsumers(RandomDag(rng, 25, 0.1));
    GroupedGraph twice = CoalesceSoleConsumers(GroupedAsGraph(once));
    EXPECT_EQ(twice.num_groups(), once.num_groups());
    for (const Group& grp : twice.groups()) EXPECT_EQ(grp.members.size(), 1u);
  }
}

TEST(GroupedGraphTest, AggregatesAndEdges) {
  std::vector<testing::OpSpec> specs = {
      {1, 10, "a", {2}}, {2, 20, "b", {3}}, {4, 0, "a", {5}}};
  auto g = MustCreate(testing::MakeOps(specs), {{0, 2, 8}, {1, 2, 12}, {0, 1, 4}});
  ASSERT_OK_AND_ASSIGN(GroupedGraph gg, GroupedGraph::FromPartition(g, {5, 5, 9}));
  ASSERT_EQ(gg.num_groups(), 2);
  EXPECT_EQ(gg.group(0).members, (std::vector<int>{0, 1}));
  EXPECT_EQ(gg.group(0).compute_cost, 3.0);
  EXPECT_EQ(gg.group(0).param_bytes, 30);
  EXPECT_EQ(gg.group(0).output_bytes, 24);  // internal edge included
  EXPECT_EQ(gg.group(0).type_counts.at("a"), 1);
  ASSERT_EQ(gg.group_edges().size(), 1u);
  EXPECT_EQ(gg.group_edges()[0].tensor_bytes, 20);
  EXPECT_EQ(gg.membership(), (std::vector<int>{0, 0, 1}));
}

TEST(GroupedGraphTest, CyclicQuotientRejected) {
  auto g = MustCreate(OpsWithCosts({1, 1, 1}), {{0, 1, 1}, {1, 2, 1}});
  EXPECT_FALSE(GroupedGraph::FromPartition(g, {0, 1, 0}).ok());
  EXPECT_FALSE(GroupedGraph::FromPartition(g, {0, 1}).ok());
}

TEST(TopoOrderTest, Examples) {
  auto chain = MustCreate(OpsWithCosts({1, 1, 1}), {{0, 1, 1}, {1, 2, 1}});
  EXPECT_EQ(TopoOrder(testing::Singletons(chain)), (std::vector<int>{0, 1, 2}));
  auto independent = MustCreate(OpsWithCosts({1, 1}), {});
  EXPECT_EQ(TopoOrder(testing::Singletons(independent)), (std::vector<int>{0, 1}));
  auto diamond = MustCreate(OpsWithCosts({1, 1, 1, 1}),
                            {{0, 2, 1}, {0, 1, 1}, {1, 3, 1}, {2, 3, 1}});
  GroupedGraph gg = testing::Singletons(diamond);
  EXPECT_EQ(TopoOrder(gg), (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(gg.topo_rank(), (std::vector<int>{0, 1, 2, 3}));
}

}  // namespace
}  // namespace devplace
