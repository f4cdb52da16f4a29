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

#include "coop_pic/sampler.h"

#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "coop_pic/pic.h"

namespace coop_pic {
namespace {

std::shared_ptr<const AgentModel> Uav(double ss, double ns) {
  return std::make_shared<UnicycleModel>(0.1, 0.05, ss, ns);
}

TEST(SamplerTest, ZeroNoisePathsAreIdentical) {
  auto model = Uav(0.0, 0.0);
  AgentPathSet set = SampleAgentPaths(*model, 0, Eigen::Vector4d(0, 0, 1, 0.2),
                                      0.0, 4, 0.5, 5, {1, 0, 0});
  ASSERT_EQ(set.size(), 5);
  for (const auto& p : set.paths) EXPECT_EQ(p, set.paths[0]);
}

TEST(SamplerTest, SinglePathAtRest) {
  auto model = Uav(0.0, 0.0);
  Eigen::Vector4d x0(2, 3, 0, 1);
  AgentPathSet set = SampleAgentPaths(*model, 0, x0, 0.0, 1, 0.2, 1, {1, 0, 0});
  ASSERT_EQ(set.paths[0].cols(), 2);
  EXPECT_EQ(Eigen::VectorXd(set.paths[0].col(0)), Eigen::VectorXd(x0));
  EXPECT_EQ(Eigen::VectorXd(set.paths[0].col(1)), Eigen::VectorXd(x0));
}

TEST(SamplerTest, MeanActuatedDisplacementMatchesDrift) {
  auto model = Uav(0.75, 0.65);
  const double eps = 0.3;
  const int n = 10000;
  AgentPathSet set = SampleAgentPaths(*model, 0, Eigen::Vector4d(0, 0, 1, 0),
                                      0.0, 1, eps, n, {9, 0, 0});
  // actuated coordinates (v, phi) have zero passive drift
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : set.paths) mean += p.col(1).tail(2) - p.col(0).tail(2);
  mean /= n;
  const Eigen::Vector2d se(0.75 * std::sqrt(eps / n), 0.65 * std::sqrt(eps / n));
  EXPECT_LT(std::abs(mean(0)), 3 * se(0));
  EXPECT_LT(std::abs(mean(1)), 3 * se(1));
}

TEST(SamplerTest, PathsIndependentOfThreadCount) {
  auto model = Uav(0.75, 0.65);
  SamplingKey key{5, 2, 7};
  AgentPathSet a = SampleAgentPaths(*model, 1, Eigen::Vector4d(0, 0, 1, 0),
                                    0.0, 8, 0.25, 64, key, 1);
  AgentPathSet b = SampleAgentPaths(*model, 1, Eigen::Vector4d(0, 0, 1, 0),
                                    0.0, 8, 0.25, 64, key, 3);
  for (int y = 0; y < 64; ++y) EXPECT_EQ(a.paths[y], b.paths[y]);
  AgentPathSet c = SampleAgentPaths(*model, 2, Eigen::Vector4d(0, 0, 1, 0),
                                    0.0, 8, 0.25, 64, key, 1);
  EXPECT_NE(a.paths[0], c.paths[0]);
}

TEST(SamplerTest, SingleMemberAssemblyEqualsAgentBatch) {
  auto model = Uav(0.75, 0.65);
  AgentPathSet set = SampleAgentPaths(*model, 0, Eigen::Vector4d(0, 0, 1, 0),
                                      0.0, 3, 0.5, 4, {1, 0, 0});
  RolloutBatch batch = AssembleJointBatch(Subsystem{0, {0}}, {&set});
  ASSERT_EQ(batch.size(), 4);
  for (int y = 0; y < 4; ++y) EXPECT_EQ(batch.rollouts[y].states, set.paths[y]);
}

TEST(SamplerTest, TwoMemberAssemblyPairsPathY) {
  auto model = Uav(0.75, 0.65);
  AgentPathSet s0 = SampleAgentPaths(*model, 0, Eigen::Vector4d(0, 0, 1, 0),
                                     0.0, 3, 0.5, 2, {1, 0, 0});
  AgentPathSet s1 = SampleAgentPaths(*model, 1, Eigen::Vector4d(5, 5, 1, 0),
                                     0.0, 3, 0.5, 2, {1, 0, 0});
  RolloutBatch batch = AssembleJointBatch(Subsystem{1, {1, 0}}, {&s1, &s0});
  for (int y = 0; y < 2; ++y) {
    EXPECT_EQ(batch.rollouts[y].states.topRows(4), s1.paths[y]);
    EXPECT_EQ(batch.rollouts[y].states.bottomRows(4), s0.paths[y]);
  }
}

// pooled covariance of the actuated increments alpha^(k) eps over all steps
Eigen::MatrixXd IncrementCovariance(const JointDynamics& dyn,
                                    const RolloutBatch& batch) {
  const int d = dyn.act_dim();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd a0(d), a1(d), fd(d);
  long n = 0;
  for (const Rollout& r : batch.rollouts) {
    for (int k = 0; k < r.segments(); ++k) {
      dyn.Actuated(r.states.col(k), a0);
      dyn.Actuated(r.states.col(k + 1), a1);
      dyn.ActuatedDrift(r.states.col(k), r.t0 + k * r.eps, fd);
      Eigen::VectorXd inc = a1 - a0 - fd * r.eps;
      sum += inc * inc.transpose();
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

void ExpectBlockDiagonalCovariance(const JointDynamics& dyn,
                                   const RolloutBatch& batch) {
  const double eps = batch.rollouts[0].eps;
  Eigen::MatrixXd cov = IncrementCovariance(dyn, batch);
  Eigen::MatrixXd expected = eps * StepWeightMatrix(dyn, batch.rollouts[0].x0()).h;
  for (int r = 0; r < cov.rows(); ++r) {
    for (int c = 0; c < cov.cols(); ++c) {
      const double scale = std::sqrt(expected(r, r) * expected(c, c));
      EXPECT_NEAR(cov(r, c), expected(r, c), 0.03 * scale)
          << "entry (" << r << ", " << c << ")";
    }
  }
}

TEST(SamplerTest, JointIncrementCovarianceIsBlockDiagonal) {
  auto model = Uav(0.75, 0.65);
  JointDynamics dyn(model, 2);
  SamplingKey key{11, 0, 0};
  AgentPathSet s0 = SampleAgentPaths(*model, 0, Eigen::Vector4d(0, 0, 1, 0),
                                     0.0, 4, 0.25, 10000, key);
  AgentPathSet s1 = SampleAgentPaths(*model, 1, Eigen::Vector4d(5, 5, 2, 1),
                                     0.0, 4, 0.25, 10000, key);
  ExpectBlockDiagonalCovariance(
      dyn, AssembleJointBatch(Subsystem{0, {0, 1}}, {&s0, &s1}));
}

TEST(SamplerTest, CentralizedMatchesDistributedInDistribution) {
  auto model = Uav(0.75, 0.65);
  JointDynamics dyn(model, 2);
  Eigen::VectorXd x0(8);
  x0 << 0, 0, 1, 0, 5, 5, 2, 1;
  RolloutBatch batch = SampleJointBatchCentralized(
      dyn, Subsystem{0, {0, 1}}, x0, 0.0, 4, 0.25, 10000, {11, 0, 0});
  ASSERT_EQ(batch.size(), 10000);
  EXPECT_EQ(Eigen::VectorXd(batch.rollouts[0].x0()), x0);
  ExpectBlockDiagonalCovariance(dyn, batch);
}

}  // namespace
}  // namespace coop_pic
