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

#include "devplace/baselines.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "support/test_util.h"

namespace devplace {
namespace {

using ::devplace::testing::MakeOps;
using ::devplace::testing::MustCreate;
using ::devplace::testing::OpSpec;
using ::devplace::testing::OpsWithCosts;
using ::devplace::testing::RandomDag;
using ::devplace::testing::RandomTopology;
using ::devplace::testing::Singletons;
using ::devplace::testing::UniformTopology;

GroupedGraph Independent(const std::vector<double>& costs) {
  return Singletons(MustCreate(OpsWithCosts(costs), {}));
}

GroupedGraph Chain(const std::vector<double>& costs, int64_t bytes) {
  std::vector<Edge> edges;
  for (size_t i = 0; i + 1 < costs.size(); ++i) {
    edges.push_back({static_cast<int>(i), static_cast<int>(i + 1), bytes});
  }
  return Singletons(MustCreate(OpsWithCosts(costs), edges));
}

double Makespan(const GroupedGraph& gg, const DeviceTopology& topo,
                const Placement& p) {
  auto r = Simulate(gg, topo, p);
  EXPECT_TRUE(r.ok()) << r.status().message();
  return r.ok() ? r->makespan_seconds : std::nan("");
}

TEST(BaselineNameTest, RoundTrip) {
  const BaselineKind kinds[] = {SingleDevice{3},  ExpertContiguous{4},
                                MincutAllDevices{}, MincutGpuOnly{},
                                RandomSearch{500, 7}, BruteForceSearch{}};
  for (const BaselineKind& k : kinds) {
    ASSERT_OK_AND_ASSIGN(BaselineKind parsed, ParseBaselineKind(BaselineName(k)));
    EXPECT_EQ(BaselineName(parsed), BaselineName(k));
  }
  EXPECT_EQ(BaselineName(SingleDevice{1}), "single_device:1");
  EXPECT_EQ(BaselineName(RandomSearch{500, 7}), "random_search:500:7");
  EXPECT_FALSE(ParseBaselineKind("nope").ok());
  EXPECT_FALSE(ParseBaselineKind("single_device:x").ok());
}

TEST(PlaceSingleTest, ConstantAssignment) {
  GroupedGraph gg = Chain({1, 1, 1, 1, 1}, 8);
  DeviceTopology topo = UniformTopology({1, 1}, 1.0);
  ASSERT_OK_AND_ASSIGN(Placement p, PlaceSingle(gg, topo, 1));
  EXPECT_EQ(p, (Placement{{1, 1, 1, 1, 1}}));
  ASSERT_OK_AND_ASSIGN(SimReport r, Simulate(gg, topo, p));
  EXPECT_EQ(r.transfer_seconds[0] + r.transfer_seconds[1], 0.0);
  EXPECT_FALSE(PlaceSingle(gg, topo, 2).ok());
}

TEST(PlaceSingleTest, InfeasibilityPropagates) {
  std::vector<OpSpec> specs = {{1.0, 64}, {1.0, 64}};
  GroupedGraph gg = Singletons(MustCreate(MakeOps(specs), {}));
  DeviceTopology topo = UniformTopology({1, 1}, 1.0, 100);
  ASSERT_OK_AND_ASSIGN(Placement p, PlaceSingle(gg, topo, 0));
  ASSERT_OK_AND_ASSIGN(SimReport r, Simulate(gg, topo, p));
  EXPECT_FALSE(r.feasible);
}

TEST(ExpertTest, EqualCostsSplitEvenly) {
  GroupedGraph gg = Chain({1, 1, 1, 1}, 4);
  DeviceTopology topo = UniformTopology({1, 1}, 1.0);
  ASSERT_OK_AND_ASSIGN(Placement p, PlaceExpertContiguous(gg, topo, 2));
  EXPECT_EQ(p, (Placement{{0, 0, 1, 1}}));
}

TEST(ExpertTest, GreedyPrefixCut) {
  GroupedGraph gg = Chain({9, 1, 1, 1}, 4);
  DeviceTopology topo = UniformTopology({1, 1}, 1.0);
  ASSERT_OK_AND_ASSIGN(Placement p, PlaceExpertContiguous(gg, topo, 2));
  EXPECT_EQ(p, (Placement{{0, 1, 1, 1}}));
}

TEST(ExpertTest, OnePartIsFirstGpu) {
  GroupedGraph gg = Chain({1, 2, 3}, 4);
  DeviceTopology topo = WorkstationTopology(2);
  ASSERT_OK_AND_ASSIGN(Placement expert, PlaceExpertContiguous(gg, topo, 1));
  ASSERT_OK_AND_ASSIGN(Placement single, PlaceSingle(gg, topo, 1));
  EXPECT_EQ(expert, single);
}

TEST(ExpertTest, PrefersGpusThenCpu) {
  GroupedGraph gg = Chain({1, 1, 1}, 4);
  DeviceTopology topo = WorkstationTopology(2);  // cpu 0, gpus 1 and 2
  ASSERT_OK_AND_ASSIGN(Placement p, PlaceExpertContiguous(gg, topo, 3));
  EXPECT_EQ(p, (Placement{{1, 2, 0}}));
}

TEST(ExpertTest, RejectsTooManyParts) {
  GroupedGraph gg = Chain({1, 1}, 4);
  DeviceTopology topo = UniformTopology({1, 1, 1}, 1.0);
  EXPECT_FALSE(PlaceExpertContiguous(gg, topo, 3).ok());
  EXPECT_FALSE(PlaceExpertContiguous(gg, topo, 0).ok());
}

TEST(ExpertTest, BlocksAreContiguousInTopoOrder) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    GroupedGraph gg = Singletons(RandomDag(rng, 12, 0.3));
    DeviceTopology topo = UniformTopology({1, 1, 1, 1}, 1.0);
    const int parts = 1 + trial % 4;
    ASSERT_OK_AND_ASSIGN(Placement p, PlaceExpertContiguous(gg, topo, parts));
    int block = 0;
    for (int g : gg.topo_order()) {
      ASSERT_GE(p[g], block);
      block = p[g];
    }
    EXPECT_EQ(block, parts - 1);
  }
}

// Two disconnected 4-cliques (as DAGs) of equal cost.
GroupedGraph TwoCliques() {
  std::vector<Edge> edges;
  for (int base : {0, 4}) {
    for (int u = 0; u < 4; ++u) {
      for (int v = u + 1; v < 4; ++v) edges.push_back({base + u, base + v, 16});
    }
  }
  return Singletons(MustCreate(OpsWithCosts(std::vector<double>(8, 1.0)), edges));
}

TEST(MincutTest, OneCliquePerDevice) {
  GroupedGraph gg = TwoCliques();
  DeviceTopology topo = UniformTopology({1, 1}, 1.0);
  MincutStats stats;
  ASSERT_OK_AND_ASSIGN(Placement p, PlaceMincut(gg, topo, true, 0, &stats));
  EXPECT_EQ(stats.cut_bytes, 0.0);
  for (int v = 1; v < 4; ++v) EXPECT_EQ(p[v], p[0]);
  for (int v = 5; v < 8; ++v) EXPECT_EQ(p[v], p[4]);
  EXPECT_NE(p[0], p[4]);
}

TEST(MincutTest, ChainHalves) {
  GroupedGraph gg = Chain({1, 1, 1, 1}, 8);
  DeviceTopology topo = UniformTopology({1, 1}, 1.0);
  MincutStats stats;
  ASSERT_OK_AND_ASSIGN(Placement p, PlaceMincut(gg, topo, true, 0, &stats));
  EXPECT_EQ(stats.cut_bytes, 8.0);
  EXPECT_EQ(p[0], p[1]);
  EXPECT_EQ(p[2], p[3]);
  EXPECT_NE(p[1], p[2]);
}

TEST(MincutTest, GpuOnlyExcludesCpu) {
  std::mt19937_64 rng(8);
  GroupedGraph gg = Singletons(RandomDag(rng, 20, 0.2));
  DeviceTopology topo = WorkstationTopology(2);
  ASSERT_OK_AND_ASSIGN(Placement p, PlaceMincut(gg, topo, false));
  for (int d : p.devices) EXPECT_TRUE(d == 1 || d == 2);
}

TEST(MincutTest, NoEligibleDevice) {
  GroupedGraph gg = Chain({1, 1}, 8);
  std::vector<Device> devices = {{0, DeviceKind::kCpu, 1.0, 1 << 20}};
  DeviceTopology topo = testing::MustTopology(devices, {{1.0}});
  EXPECT_FALSE(PlaceMincut(gg, topo, false).ok());
  EXPECT_TRUE(PlaceMincut(gg, topo, true).ok());
}

TEST(MincutTest, RefinementNeverIncreasesCutAndBalances) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    GroupedGraph gg = Singletons(RandomDag(rng, 30, 0.15, false));
    DeviceTopology topo = UniformTopology({1.0, 2.0, 1.0}, 1.0);
    MincutStats stats;
    ASSERT_OK_AND_ASSIGN(Placement p, PlaceMincut(gg, topo, true, trial, &stats));
    for (const auto& [before, after] : stats.refine_passes) {
      EXPECT_LE(after, before + 1e-9);
    }
    if (!stats.balanced) continue;
    // Loads within 1.10 x the rate-weighted ideal.
    std::vector<double> load(3, 0.0);
    for (int g = 0; g < gg.num_groups(); ++g) load[p[g]] += gg.group(g).compute_cost;
    const double total = gg.TotalCost();
    const double rates[] = {1.0, 2.0, 1.0};
    for (int d = 0; d < 3; ++d) {
      EXPECT_LE(load[d], 1.10 * total * rates[d] / 4.0 + 1e-9);
    }
  }
}

TEST(MincutTest, Deterministic) {
  std::mt19937_64 rng(13);
  GroupedGraph gg = Singletons(RandomDag(rng, 25, 0.2));
  DeviceTopology topo = WorkstationTopology(3);
  EXPECT_EQ(*PlaceMincut(gg, topo, true, 5), *PlaceMincut(gg, topo, true, 5));
}

TEST(RandomSearchTest, BudgetOneIsDeterministic) {
  GroupedGraph gg = Independent({1, 2, 3});
  DeviceTopology topo = UniformTopology({1, 2}, 1.0);
  ASSERT_OK_AND_ASSIGN(Placement a, PlaceRandomSearch(gg, topo, 1, 42));
  ASSERT_OK_AND_ASSIGN(Placement b, PlaceRandomSearch(gg, topo, 1, 42));
  EXPECT_EQ(a, b);
  EXPECT_FALSE(PlaceRandomSearch(gg, topo, 0, 42).ok());
}

TEST(RandomSearchTest, ExhaustiveBudgetMatchesBruteForce) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    GroupedGraph gg = Singletons(RandomDag(rng, 4, 0.4));
    DeviceTopology topo = RandomTopology(rng, 3);
    ASSERT_OK_AND_ASSIGN(Placement p, PlaceRandomSearch(gg, topo, 81, trial));
    ASSERT_OK_AND_ASSIGN(BruteForceResult bf, BruteForce(gg, topo));
    EXPECT_EQ(Makespan(gg, topo, p), bf.report.makespan_seconds);
  }
}

TEST(RandomSearchTest, NoneFeasible) {
  std::vector<OpSpec> specs = {{1.0, 64}, {1.0, 64}};
  GroupedGraph gg = Singletons(MustCreate(MakeOps(specs), {}));
  DeviceTopology topo = UniformTopology({1, 1}, 1.0, 1);
  auto r = PlaceRandomSearch(gg, topo, 10, 1);
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(absl::IsNotFound(r.status()));
}

TEST(BruteForceTest, FastestDeviceForOneGroup) {
  GroupedGraph gg = Independent({4.0});
  DeviceTopology topo = UniformTopology({1, 2, 4}, 1.0);
  ASSERT_OK_AND_ASSIGN(BruteForceResult r, BruteForce(gg, topo));
  EXPECT_EQ(r.placement, (Placement{{2}}));
  EXPECT_EQ(r.report.makespan_seconds, 1.0);
  EXPECT_EQ(r.evaluated, 3u);
}

TEST(BruteForceTest, ChainCoLocates) {
  GroupedGraph gg = Chain({2.0, 3.0}, 8);
  DeviceTopology topo = UniformTopology({1, 1}, 4.0);
  ASSERT_OK_AND_ASSIGN(BruteForceResult r, BruteForce(gg, topo));
  EXPECT_EQ(r.report.makespan_seconds, 5.0);
  EXPECT_EQ(r.placement, (Placement{{0, 0}}));  // lexicographic tie-break
  EXPECT_EQ(Makespan(gg, topo, Placement{{0, 1}}), 7.0);
}

TEST(BruteForceTest, IndependentGroupsSplit) {
  GroupedGraph gg = Independent({3.0, 3.0});
  DeviceTopology topo = UniformTopology({1, 1}, 1.0);
  ASSERT_OK_AND_ASSIGN(BruteForceResult r, BruteForce(gg, topo));
  EXPECT_EQ(r.report.makespan_seconds, 3.0);
  EXPECT_EQ(r.placement, (Placement{{0, 1}}));
}

// Plain enumeration; first strict minimum in lexicographic order.
TEST(BruteForceTest, MatchesNaiveEnumeration) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    const int d = 1 + static_cast<int>(rng() % 3);
    GroupedGraph gg = Singletons(RandomDag(rng, n, 0.4));
    DeviceTopology topo = RandomTopology(rng, d);
    ASSERT_OK_AND_ASSIGN(BruteForceResult bf, BruteForce(gg, topo));
    int total = 1;
    for (int i = 0; i < n; ++i) total *= d;
    double best = INFINITY;
    Placement best_p;
    for (int code = 0; code < total; ++code) {
      Placement p{std::vector<int>(n)};
      for (int i = n - 1, c = code; i >= 0; --i, c /= d) p.devices[i] = c % d;
      const double m = Makespan(gg, topo, p);
      if (m < best) {
        best = m;
        best_p = p;
      }
    }
    EXPECT_EQ(bf.report.makespan_seconds, best);
    EXPECT_EQ(bf.placement, best_p);
    EXPECT_EQ(bf.evaluated, static_cast<uint64_t>(total));
  }
}

TEST(BruteForceTest, DominatesEveryStrategy) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int d = 2 + static_cast<int>(rng() % 2);
    GroupedGraph gg = Singletons(RandomDag(rng, n, 0.35));
    DeviceTopology topo = RandomTopology(rng, d);
    ASSERT_OK_AND_ASSIGN(BruteForceResult bf, BruteForce(gg, topo));
    std::vector<BaselineKind> kinds = {MincutAllDevices{}, MincutGpuOnly{},
                                       RandomSearch{10, 3}};
    for (int dev = 0; dev < d; ++dev) kinds.push_back(SingleDevice{dev});
    for (int parts = 1; parts <= std::min(n, d); ++parts) {
      kinds.push_back(ExpertContiguous{parts});
    }
    for (const BaselineKind& k : kinds) {
      ASSERT_OK_AND_ASSIGN(Placement p, RunBaseline(gg, topo, k));
      EXPECT_LE(bf.report.makespan_seconds, Makespan(gg, topo, p))
          << BaselineName(k) << " trial " << trial;
    }
  }
}

TEST(BruteForceTest, CapAndInfeasibility) {
  GroupedGraph gg = Independent(std::vector<double>(5, 1.0));
  DeviceTopology topo = UniformTopology({1, 1, 1}, 1.0);
  auto capped = BruteForce(gg, topo, 242);  // 3^5 = 243
  ASSERT_FALSE(capped.ok());
  EXPECT_TRUE(absl::IsResourceExhausted(capped.status()));
  EXPECT_TRUE(BruteForce(gg, topo, 243).ok());

  GroupedGraph wide = Independent(std::vector<double>(70, 1.0));
  DeviceTopology many = UniformTopology(std::vector<double>(16, 1.0), 1.0);
  EXPECT_TRUE(absl::IsResourceExhausted(BruteForce(wide, many).status()));

  std::vector<OpSpec> specs = {{1.0, 64}};
  GroupedGraph heavy = Singletons(MustCreate(MakeOps(specs), {}));
  EXPECT_TRUE(absl::IsNotFound(
      BruteForce(heavy, UniformTopology({1, 1}, 1.0, 1)).status()));
}

}  // namespace
}  // namespace devplace
