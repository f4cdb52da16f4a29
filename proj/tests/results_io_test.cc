// Copyright 2026 The coop_pic Authors
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

#include "coop_pic/results_io.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "coop_pic/runner.h"
#include "coop_pic/scenario.h"
#include "test_scenarios.h"

namespace coop_pic {
namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class ResultsIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("coop_pic_results_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    std::filesystem::remove_all(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
};

TEST_F(ResultsIoTest, TwoTrialsWriteTwoTrajectoriesAndOneSummary) {
  Scenario sc = ScenarioFromString(testing::SmallLoopYaml());
  auto results = RunTrials(sc, 2, sc.seed);
  WrittenFiles files = WriteResults(sc, results, dir_.string());
  ASSERT_EQ(files.trajectories.size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "trajectory_trial_001.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "trajectory_trial_002.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "diagnostics.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "trials.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "scenario.yaml"));

  std::string summary = ReadFile(files.summary);
  std::string header = summary.substr(0, summary.find('\n'));
  EXPECT_NE(header.find("dist_1_3_mean"), std::string::npos);
  EXPECT_NE(header.find("goal_err_2_std"), std::string::npos);

  std::string traj = ReadFile(files.trajectories[0]);
  EXPECT_EQ(traj.substr(0, traj.find('\n')),
            "trial,t,agent,x,y,v,phi,u,omega");
  EXPECT_EQ(ReadFile(files.trials).substr(0, 44),
            "trial,seed,ok,cycles,ess_low_cycles,failure\n");
}

TEST_F(ResultsIoTest, SameSeedGivesByteIdenticalFiles) {
  Scenario sc = ScenarioFromString(testing::SmallLoopYaml());
  WrittenFiles a = WriteResults(sc, RunTrials(sc, 2, 5), (dir_ / "a").string());
  RunOptions threaded;
  threaded.threads = 2;
  WrittenFiles b =
      WriteResults(sc, RunTrials(sc, 2, 5, threaded), (dir_ / "b").string());
  for (std::size_t k = 0; k < a.trajectories.size(); ++k) {
    EXPECT_EQ(ReadFile(a.trajectories[k]), ReadFile(b.trajectories[k]));
  }
  EXPECT_EQ(ReadFile(a.summary), ReadFile(b.summary));
  EXPECT_EQ(ReadFile(a.diagnostics), ReadFile(b.diagnostics));
}

TEST_F(ResultsIoTest, EchoReproducesTheRun) {
  Scenario sc = ScenarioFromString(testing::SmallLoopYaml());
  WrittenFiles a = WriteResults(sc, RunTrials(sc, 1, sc.seed), (dir_ / "a").string());
  Scenario echo = LoadScenario(a.scenario_echo);
  WrittenFiles b =
      WriteResults(echo, RunTrials(echo, 1, echo.seed), (dir_ / "b").string());
  EXPECT_EQ(ReadFile(a.trajectories[0]), ReadFile(b.trajectories[0]));
}

TEST_F(ResultsIoTest, DoublesRoundTrip) {
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(FormatDouble(v)), v);
}

TEST_F(ResultsIoTest, RolloutDump) {
  Scenario sc = ScenarioFromString(testing::SmallLoopYaml());
  RunOptions options;
  options.observer = RolloutDumper(sc, dir_.string());
  RunTrial(sc, 0, 1, options);
  auto p = dir_ / "rollouts" / "trial_001_cycle_0000_agent_1.csv";
  ASSERT_TRUE(std::filesystem::exists(p));
  std::string text = ReadFile(p.string());
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "rollout,k,t,x_1,y_1,v_1,phi_1,x_2,y_2,v_2,phi_2,x_3,y_3,v_3,phi_3,"
            "score,weight");
}

}  // namespace
}  // namespace coop_pic
