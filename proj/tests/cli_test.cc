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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "devplace/topology.h"
#include "gtest/gtest.h"
#include "support/test_util.h"

namespace devplace {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome Invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::create_directories(dir_);
  }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  // Small rnnlm (10 groups) and a 1 cpu + 2 gpu topology.
  void WriteInputs() {
    ASSERT_EQ(Invoke({"generate", "--family", "rnnlm_grid", "--layers", "1",
                   "--steps", "1", "--seed", "1", "--out", Path("g.json")})
                  .code,
              0);
    ASSERT_EQ(Invoke({"generate", "--family", "topology", "--gpus", "2", "--out",
                   Path("t2.json")})
                  .code,
              0);
  }

  fs::path dir_;
};

TEST_F(CliTest, GenerateThenBruteForce) {
  WriteInputs();
  Outcome r = Invoke({"bruteforce", "--graph", Path("g.json"), "--topology",
                   Path("t2.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("optimal makespan_s=", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("feasible=1"), std::string::npos);

  // The optimum never loses to a baseline.
  Outcome single = Invoke({"baseline", "--kind", "single_device:1", "--graph",
                        Path("g.json"), "--topology", Path("t2.json")});
  ASSERT_EQ(single.code, 0) << single.err;
  auto makespan = [](const std::string& line) {
    const size_t at = line.find("makespan_s=") + 11;
    return std::stod(line.substr(at, line.find(' ', at) - at));
  };
  EXPECT_LE(makespan(r.out), makespan(single.out));
}

TEST_F(CliTest, GenerateIsDeterministic) {
  for (const char* name : {"a.json", "b.json"}) {
    ASSERT_EQ(Invoke({"generate", "--family", "nmt_attention", "--seed", "3",
                   "--out", Path(name)})
                  .code,
              0);
  }
  EXPECT_EQ(Slurp(Path("a.json")), Slurp(Path("b.json")));
  EXPECT_FALSE(Slurp(Path("a.json")).empty());
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Invoke({"bruteforce", "--no-such-flag"}).code, 1);
  EXPECT_EQ(Invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(Invoke({}).code, 1);
  EXPECT_EQ(Invoke({"generate", "--family", "resnet"}).code, 1);
  EXPECT_EQ(Invoke({"bruteforce", "--graph", Path("missing.json"), "--topology",
                 Path("missing.json")})
                .code,
            1);
  WriteInputs();
  EXPECT_EQ(Invoke({"baseline", "--graph", Path("g.json"), "--topology",
                 Path("t2.json"), "--kind", "bogus"})
                .code,
            1);
  // 3^10 placements against a cap of 10.
  EXPECT_EQ(Invoke({"bruteforce", "--graph", Path("g.json"), "--topology",
                 Path("t2.json"), "--cap", "10"})
                .code,
            1);
  EXPECT_EQ(Invoke({"--help"}).code, 0);
}

TEST_F(CliTest, TrainTwiceGivesIdenticalLogs) {
  WriteInputs();
  std::vector<std::string> outputs;
  for (const char* log : {"log1.csv", "log2.csv"}) {
    Outcome r = Invoke({"train", "--graph", Path("g.json"), "--topology",
                     Path("t2.json"), "--seed", "5", "--controllers", "1",
                     "--total-updates", "20", "--success-only-after", "5",
                     "--hidden", "8", "--log", Path(log)});
    ASSERT_EQ(r.code, 0) << r.err;
    outputs.push_back(r.out);
  }
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_EQ(outputs[0].rfind("rl makespan_s=", 0), 0u);
  const std::string log = Slurp(Path("log1.csv"));
  EXPECT_EQ(log, Slurp(Path("log2.csv")));
  EXPECT_EQ(log.rfind("update_index,controller_id,store_version,", 0), 0u);
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 21);
}

TEST_F(CliTest, InfeasibleOutcomesExitTwo) {
  WriteInputs();
  {
    std::ofstream f(Path("tiny.json"));
    f << SerializeTopology(testing::UniformTopology({1.0, 1.0}, 1.0, 1));
  }
  const std::vector<std::string> io = {"--graph", Path("g.json"), "--topology",
                                       Path("tiny.json")};
  auto with = [&](std::vector<std::string> args) {
    args.insert(args.end(), io.begin(), io.end());
    return Invoke(args).code;
  };
  EXPECT_EQ(with({"baseline", "--kind", "single_device:0"}), 2);
  EXPECT_EQ(with({"bruteforce"}), 2);
  EXPECT_EQ(with({"train", "--total-updates", "3", "--hidden", "4"}), 2);
}

TEST_F(CliTest, ReportWritesCsvAndProfile) {
  WriteInputs();
  Outcome r = Invoke({"report", "--graph", Path("g.json"), "--topology",
                   Path("t2.json"), "--strategies",
                   "single_device:0,single_device:1,mincut_gpu_only,brute_force",
                   "--profile", Path("profile.csv"), "--out", Path("report.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = Slurp(Path("report.csv"));
  EXPECT_EQ(csv.rfind("strategy,makespan_s,feasible,search_wall_s,placement\n", 0),
            0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  const std::string profile = Slurp(Path("profile.csv"));
  EXPECT_EQ(profile.rfind("device,busy_s,transfer_s,peak_bytes\n", 0), 0u);
  EXPECT_EQ(std::count(profile.begin(), profile.end(), '\n'), 4);
}

TEST_F(CliTest, Selftest) {
  Outcome r = Invoke({"selftest"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("selftest ok", 0), 0u) << r.out;
}

}  // namespace
}  // namespace devplace
