// Copyright 2026 The mdvrp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdvrp/checkpoint.h"
#include "mdvrp/policy.h"

namespace mdvrp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
  json summary;
};

Result Cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = cli::Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  std::string last = r.out;
  while (!last.empty() && last.back() == '\n') last.pop_back();
  last = last.substr(last.rfind('\n') == std::string::npos ? 0 : last.rfind('\n') + 1);
  r.summary = json::parse(last, nullptr, false);
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mdvrp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, GenIsByteIdenticalAcrossRuns) {
  for (const char* sub : {"a", "b"}) {
    const Result r = Cli({"gen", "-n", "6", "-m", "2", "--variant", "MDVRP", "--count", "10", "--seed", "1", "--out",
                          Path(sub)});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.summary["status"], "ok");
    EXPECT_EQ(r.summary["files"], 10);
  }
  int files = 0;
  for (const fs::directory_entry& e : fs::directory_iterator(Path("a"))) {
    EXPECT_EQ(Slurp(e.path()), Slurp(fs::path(Path("b")) / e.path().filename())) << e.path();
    ++files;
  }
  EXPECT_EQ(files, 10);
}

TEST_F(CliTest, VariantTokens) {
  const Result bad = Cli({"gen", "--variant", "MDOVRPI", "--out", Path("x")});
  EXPECT_EQ(bad.code, cli::kExitUsage);
  EXPECT_EQ(bad.summary["status"], "usage");
  for (const VariantFlags& v : AllVariants()) {
    const Result r = Cli({"gen", "-n", "2", "-m", "2", "--count", "1", "--variant", v.Name(), "--out", Path(v.Name())});
    EXPECT_EQ(r.code, 0) << v.Name() << r.err;
  }
}

TEST_F(CliTest, UnknownFlagIsUsageError) {
  const Result r = Cli({"gen", "--bogus"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_EQ(r.summary["status"], "usage");
  EXPECT_EQ(Cli({}).code, cli::kExitUsage);
}

TEST_F(CliTest, TrainZeroEpochsWritesInitialization) {
  const Result r = Cli({"train", "--epochs", "0", "--dim", "8", "--layers", "1", "--ff-hidden", "16", "--seed", "4",
                        "--out", Path("run")});
  ASSERT_EQ(r.code, 0) << r.err;
  PolicyConfig cfg;
  cfg.dim = 8;
  cfg.layers = 1;
  cfg.ff_hidden = 16;
  const PolicyParams saved = ReadCheckpointFile(Path("run/checkpoint.txt"));
  EXPECT_EQ(WriteCheckpointToString(saved), WriteCheckpointToString(MakeInitializedPolicy(cfg, 4, false)));
}

TEST_F(CliTest, TrainThenEval) {
  ASSERT_EQ(Cli({"gen", "-n", "5", "-m", "3", "--variant", "MDVRPTW", "--count", "3", "--out", Path("data")}).code, 0);
  const Result t = Cli({"train", "--epochs", "1", "--instances-per-epoch", "4", "--batch-size", "2", "-n", "4", "-m", "2",
                        "--dim", "8", "--layers", "1", "--ff-hidden", "16", "--out", Path("run")});
  ASSERT_EQ(t.code, 0) << t.err;
  const std::string metrics = Slurp(Path("run/metrics.tsv"));
  EXPECT_EQ(metrics.rfind("epoch\tphase\tpool_size\tloss\tmean_cost\tgrad_norm\n", 0), 0u);
  const Result plain = Cli({"eval", "--checkpoint", Path("run/checkpoint.txt"), "--instances", Path("data"), "--starts",
                            "full"});
  ASSERT_EQ(plain.code, 0) << plain.err;
  EXPECT_NE(plain.out.find("trajectories\t15\n"), std::string::npos);
  const Result aug = Cli({"eval", "--checkpoint", Path("run/checkpoint.txt"), "--instances", Path("data"), "--starts",
                          "full", "--augment8"});
  ASSERT_EQ(aug.code, 0) << aug.err;
  EXPECT_NE(aug.out.find("trajectories\t120\n"), std::string::npos);
  EXPECT_LE(aug.summary["mean_cost"].get<double>(), plain.summary["mean_cost"].get<double>());
  const Result wrong = Cli({"eval", "--checkpoint", Path("run/checkpoint.txt"), "--instances", Path("data"), "--dim",
                            "16"});
  EXPECT_NE(wrong.code, 0);
}

TEST_F(CliTest, CheckFlagsCorruptedCoordinate) {
  ASSERT_EQ(Cli({"gen", "-n", "4", "-m", "2", "--count", "2", "--out", Path("data")}).code, 0);
  const Result clean = Cli({"check", "--instances", Path("data")});
  EXPECT_EQ(clean.code, 0) << clean.out;
  fs::path victim;
  for (const fs::directory_entry& e : fs::directory_iterator(Path("data"))) victim = e.path();
  std::string text = Slurp(victim);
  const std::size_t at = text.find("[DEPOTS]\n") + 9;
  text.replace(at, text.find(' ', at) - at, "1.5");
  std::ofstream(victim, std::ios::binary) << text;
  const Result r = Cli({"check", "--instances", Path("data")});
  EXPECT_EQ(r.code, cli::kExitAuditFailure);
  EXPECT_NE(r.out.find("coordinates"), std::string::npos) << r.out;
  EXPECT_EQ(r.summary["status"], "fail");
}

TEST_F(CliTest, OracleReportsGreedyGap) {
  ASSERT_EQ(Cli({"gen", "-n", "5", "-m", "2", "--count", "2", "--out", Path("data")}).code, 0);
  const Result r = Cli({"oracle", "--instances", Path("data")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GE(r.summary["mean_greedy_gap"].get<double>(), -1e-9);
}

TEST_F(CliTest, GradcheckPasses) {
  const Result r = Cli({"gradcheck", "--coords", "32"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_LT(r.summary["po_max_relative_error"].get<double>(), 1e-4);
  EXPECT_LT(r.summary["reinforce_max_relative_error"].get<double>(), 1e-4);
}

TEST_F(CliTest, EnvironmentOverridesDefault) {
  ::setenv("MDVRP_SEED", "77", 1);
  const Result env = Cli({"gen", "-n", "3", "-m", "2", "--count", "1", "--out", Path("env")});
  ::unsetenv("MDVRP_SEED");
  ASSERT_EQ(env.code, 0);
  EXPECT_EQ(env.summary["seed"], 77);
  ASSERT_EQ(Cli({"gen", "-n", "3", "-m", "2", "--count", "1", "--seed", "77", "--out", Path("flag")}).code, 0);
  for (const fs::directory_entry& e : fs::directory_iterator(Path("env"))) {
    EXPECT_EQ(Slurp(e.path()), Slurp(fs::path(Path("flag")) / e.path().filename()));
  }
}

TEST_F(CliTest, SummaryIsLastLine) {
  const Result r = Cli({"gen", "-n", "3", "-m", "2", "--count", "2", "--out", Path("d"), "--format", "text"});
  ASSERT_FALSE(r.summary.is_discarded()) << r.out;
  EXPECT_EQ(r.summary["command"], "gen");
  EXPECT_EQ(r.out.back(), '\n');
}

}  // namespace
}  // namespace mdvrp
