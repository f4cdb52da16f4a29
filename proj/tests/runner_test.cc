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

#include "coop_pic/runner.h"

#include <set>

#include <gtest/gtest.h>

#include "coop_pic/error.h"
#include "coop_pic/scenario.h"
#include "test_scenarios.h"

namespace coop_pic {
namespace {

TEST(RunnerTest, ScheduleEps) {
  CycleSchedule a = ScheduleEps(0.0, 18.0, 8, 0.2);
  EXPECT_DOUBLE_EQ(a.eps, 2.25);
  EXPECT_EQ(a.segments, 8);
  CycleSchedule b = ScheduleEps(17.0, 18.0, 8, 0.2);
  EXPECT_NEAR(b.eps, 0.2, 1e-12);
  EXPECT_EQ(b.segments, 5);
  CycleSchedule c = ScheduleEps(17.8, 18.0, 8, 0.2);
  EXPECT_NEAR(c.eps, 0.2, 1e-12);
  EXPECT_EQ(c.segments, 1);
  EXPECT_THROW(ScheduleEps(18.0, 18.0, 8, 0.2), Error);
}

TEST(RunnerTest, ScheduleClampFloorsTheSegmentCount) {
  // (t_f - t) = 0.5 is not a multiple of the period
  CycleSchedule s = ScheduleEps(17.5, 18.0, 8, 0.2);
  EXPECT_EQ(s.segments, 2);
  EXPECT_NEAR(s.eps, 0.2, 1e-12);
}

TEST(RunnerTest, CycleCount) {
  EXPECT_EQ(CycleCount(0.0, 0.2, 0.2), 1);
  EXPECT_EQ(CycleCount(0.0, 18.0, 0.2), 90);
}

TEST(RunnerTest, SingleAgentWithoutNoiseDrifts) {
  Scenario sc = ScenarioFromString(R"(name: drift
agents: 1
edges: []
model: {kind: unicycle, noise: [0, 0], sampling_noise: [0, 0]}
initial_states: [[0, 0, 1, 0]]
horizon: {t_final: 1.0, period: 0.2, segments: 4, rollouts: 5}
costs:
  goals: [[10, 0, 0, 0]]
  goal_weights: [0]
)");
  TrialResult r = RunTrial(sc, 0, 3);
  ASSERT_TRUE(r.ok) << r.failure;
  ASSERT_EQ(r.times.size(), 6u);
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    EXPECT_NEAR(r.states[0][k](0), r.times[k], 1e-12);
    EXPECT_EQ(r.states[0][k](1), 0.0);
    EXPECT_TRUE(r.controls[0][k].isZero(0.0));
  }
}

TEST(RunnerTest, OneCycleDiagnostics) {
  Scenario sc = ScenarioFromString(testing::SmallLoopYaml());
  Planner planner(sc);
  CycleOutcome out = RunCycle(planner, sc.initial_states, 0.0, {1, 0, 0});
  ASSERT_EQ(out.diagnostics.size(), 3u);
  for (const auto& d : out.diagnostics) {
    EXPECT_GE(d.ess, 1.0 - 1e-12);
    EXPECT_LE(d.ess, sc.rollouts + 1e-9);
    EXPECT_EQ(d.segments, 4);
    EXPECT_NEAR(d.eps, 0.25, 1e-12);
  }
  ASSERT_EQ(out.controls.size(), 3u);
  EXPECT_EQ(out.controls[0].size(), 2);
}

TEST(RunnerTest, ReplayIsDeterministic) {
  Scenario sc = ScenarioFromString(testing::SmallLoopYaml());
  TrialResult a = RunTrial(sc, 1, 99);
  TrialResult b = RunTrial(sc, 1, 99);
  ASSERT_TRUE(a.ok);
  EXPECT_EQ(a.times, b.times);
  for (int ag = 0; ag < 3; ++ag) {
    for (std::size_t k = 0; k < a.times.size(); ++k) {
      EXPECT_EQ(a.states[ag][k], b.states[ag][k]);
      EXPECT_EQ(a.controls[ag][k], b.controls[ag][k]);
    }
  }
  TrialResult c = RunTrial(sc, 2, 99);
  EXPECT_NE(a.states[0].back(), c.states[0].back());
}

TEST(RunnerTest, ThreadCountDoesNotChangeResults) {
  Scenario sc = ScenarioFromString(testing::SmallLoopYaml());
  RunOptions serial, parallel;
  parallel.threads = 3;
  auto a = RunTrials(sc, 3, 5, serial);
  auto b = RunTrials(sc, 3, 5, parallel);
  for (int t = 0; t < 3; ++t) {
    EXPECT_EQ(a[t].seed, b[t].seed);
    EXPECT_EQ(a[t].states[2].back(), b[t].states[2].back());
  }
}

TEST(RunnerTest, DistinctTrialSeeds) {
  std::set<std::uint64_t> seeds;
  for (int t = 0; t < 100; ++t) seeds.insert(TrialSeed(20190603, t));
  EXPECT_EQ(seeds.size(), 100u);
}

TEST(RunnerTest, CentralizedSamplingRuns) {
  Scenario sc = ScenarioFromString(
      testing::SmallLoopYaml("", "  sampling: centralized\n"));
  EXPECT_EQ(sc.sampling, SamplingMode::kCentralized);
  TrialResult r = RunTrial(sc, 0, 4);
  EXPECT_TRUE(r.ok) << r.failure;
  EXPECT_EQ(r.cycles, 5);
}

TEST(RunnerTest, SummaryStatistics) {
  Scenario sc = ScenarioFromString(testing::SmallLoopYaml());
  auto results = RunTrials(sc, 2, 8);
  TrialSummary s = Summarize(sc, results);
  EXPECT_EQ(s.successful, 2);
  ASSERT_EQ(s.pairs.size(), 3u);
  ASSERT_EQ(s.times.size(), results[0].times.size());
  const auto& d12 = s.pair_distance[0];
  double a = AgentDistance(sc, results[0], s.pairs[0].first, s.pairs[0].second, 0);
  EXPECT_NEAR(d12.mean[0], a, 1e-12);
  EXPECT_NEAR(d12.stddev[0], 0.0, 1e-12);
  EXPECT_EQ(d12.count[0], 2);
}

}  // namespace
}  // namespace coop_pic
