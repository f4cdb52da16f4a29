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

#include "coop_pic/costs.h"

#include <cmath>

#include <gtest/gtest.h>

#include "coop_pic/error.h"
#include "coop_pic/network.h"

namespace coop_pic {
namespace {

// fig3-style loop: agents at (5,5), (5,20), (5,35), shared goal (35,20)
CostSpec LoopSpec() {
  CostSpec spec;
  spec.goal_weights = {0.7, 0.9, 0.7};
  spec.pair_weights = {{{0, 2}, 1.4}, {{2, 0}, 1.4}};
  for (int a = 0; a < 3; ++a) {
    spec.goals.push_back(Eigen::Vector4d(35, 20, 0, 0));
  }
  spec.goal_regularizers = {0.0, 0.0, 0.0};
  return spec;
}

Eigen::VectorXd LoopState() {
  Eigen::VectorXd x(12);
  x << 5, 5, 0.3, 0, 5, 20, 0.3, 0, 5, 35, 0.3, 0;
  return x;
}

CommGraph Loop3() { return CommGraph(3, {{0, 1}, {1, 2}, {0, 2}}); }

TEST(CostsTest, AllWeightsZeroGivesZero) {
  CostSpec spec = LoopSpec();
  spec.goal_weights = {0, 0, 0};
  spec.pair_weights.clear();
  SubsystemCost cost(spec, MakeSubsystem(Loop3(), 0), 4, 2);
  EXPECT_EQ(cost.Running(LoopState(), 0.0), 0.0);
}

TEST(CostsTest, WeightedDistances) {
  SubsystemCost cost(LoopSpec(), MakeSubsystem(Loop3(), 0), 4, 2);
  EXPECT_NEAR(cost.Running(LoopState(), 0.0),
              0.7 * std::sqrt(1125.0) + 1.4 * 30.0, 1e-12);
  // agent 2 has no pair weight to its neighbors
  SubsystemCost middle(LoopSpec(), MakeSubsystem(Loop3(), 1), 4, 2);
  Eigen::VectorXd x = LoopState();
  Eigen::VectorXd xs(12);
  xs << x.segment(4, 4), x.segment(0, 4), x.segment(8, 4);
  EXPECT_NEAR(middle.Running(xs, 0.0), 0.9 * 30.0, 1e-12);
}

TEST(CostsTest, InitialRegularizersZeroTheStartCost) {
  CostSpec spec = LoopSpec();
  spec.goal_regularizers[0] = std::sqrt(1125.0);
  spec.pair_regularizers[{0, 2}] = 30.0;
  SubsystemCost cost(spec, MakeSubsystem(Loop3(), 0), 4, 2);
  EXPECT_NEAR(cost.Running(LoopState(), 0.0), 0.0, 1e-12);
}

TEST(CostsTest, ClampedAtZero) {
  CostSpec spec = LoopSpec();
  spec.goal_regularizers[0] = 100.0;
  SubsystemCost cost(spec, MakeSubsystem(Loop3(), 0), 4, 2);
  EXPECT_LT(cost.RawDistanceCost(LoopState()), 0.0);
  EXPECT_EQ(cost.Running(LoopState(), 0.0), 0.0);
}

TEST(CostsTest, ObstaclePenaltyReplacesDistanceCost) {
  CostSpec spec = LoopSpec();
  spec.obstacles.push_back(
      {Eigen::Vector2d(0, 0), Eigen::Vector2d(10, 10), 120.0});
  SubsystemCost cost(spec, MakeSubsystem(Loop3(), 0), 4, 2);
  EXPECT_EQ(cost.Running(LoopState(), 0.0), 120.0);
  // a neighbor inside the box does not trigger the center's penalty
  SubsystemCost other(spec, MakeSubsystem(Loop3(), 2), 4, 2);
  Eigen::VectorXd x = LoopState();
  Eigen::VectorXd xs(12);
  xs << x.segment(8, 4), x.segment(0, 4), x.segment(4, 4);
  EXPECT_NE(other.Running(xs, 0.0), 120.0);
}

TEST(CostsTest, ObstacleBoundaryCountsAsInside) {
  Obstacle box{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), 5.0};
  EXPECT_TRUE(box.Contains(Eigen::Vector2d(1, 0.5)));
  EXPECT_FALSE(box.Contains(Eigen::Vector2d(1.0 + 1e-12, 0.5)));
}

TEST(CostsTest, TerminalCost) {
  CostSpec spec;
  spec.goal_weights = {0.0};
  spec.goals = {Eigen::Vector4d(3, 4, 0, 0)};
  CommGraph single(1, {});
  SubsystemCost zero(spec, MakeSubsystem(single, 0), 4, 2);
  EXPECT_EQ(zero.Terminal(Eigen::Vector4d(0, 4, 1, 1)), 0.0);
  spec.terminal = {TerminalKind::kQuadratic, 1.0};
  SubsystemCost quad(spec, MakeSubsystem(single, 0), 4, 2);
  EXPECT_EQ(quad.Terminal(Eigen::Vector4d(3, 4, 1, 1)), 0.0);
  EXPECT_NEAR(quad.Terminal(Eigen::Vector4d(0, 4, 1, 1)), 9.0, 1e-12);
}

TEST(CostsTest, AnalyticGradientMatchesFiniteDifference) {
  SubsystemCost cost(LoopSpec(), MakeSubsystem(Loop3(), 0), 4, 2);
  Eigen::VectorXd x = LoopState();
  x(0) += 1.3;
  x(9) -= 2.1;
  Eigen::VectorXd an(12), fd(12);
  cost.RunningGradient(x, 0.0, an);
  cost.FiniteDifferenceGradient(x, 0.0, fd);
  EXPECT_LT((an - fd).norm() / std::max(1.0, an.norm()), 1e-6);
  // only positions carry gradient
  EXPECT_EQ(an(2), 0.0);
  EXPECT_EQ(an(3), 0.0);
}

TEST(CostsTest, LinearCostFiniteDifferenceSlope) {
  // |p - g| is linear along the ray away from g with slope w
  CostSpec spec;
  spec.goal_weights = {0.6};
  spec.goals = {Eigen::Vector4d(0, 0, 0, 0)};
  SubsystemCost cost(spec, MakeSubsystem(CommGraph(1, {}), 0), 4, 2);
  Eigen::VectorXd grad(4);
  cost.FiniteDifferenceGradient(Eigen::Vector4d(7, 0, 0, 0), 0.0, grad);
  EXPECT_NEAR(grad(0), 0.6, 0.6 * 1e-6);
}

TEST(CostsTest, DerivedControlWeight) {
  EXPECT_TRUE(DeriveControlWeight(Eigen::Matrix2d::Identity(), 1.0)
                  .isApprox(Eigen::Matrix2d::Identity()));
  Eigen::MatrixXd r =
      DeriveControlWeight(Eigen::Vector2d(0.75, 0.65).asDiagonal(), 1.0);
  EXPECT_NEAR(r(0, 0), 1.0 / 0.5625, 1e-12);
  EXPECT_NEAR(r(1, 1), 1.0 / 0.4225, 1e-12);
  EXPECT_NEAR(r(0, 0), 1.7778, 1e-4);
  EXPECT_NEAR(r(1, 1), 2.3669, 1e-4);
  EXPECT_EQ(r(0, 1), 0.0);
}

TEST(CostsTest, IdentityControlWeightIsInconsistent) {
  Eigen::MatrixXd derived =
      DeriveControlWeight(Eigen::Vector2d(0.75, 0.65).asDiagonal(), 1.0);
  EXPECT_GT(ControlWeightMismatch(Eigen::Matrix2d::Identity(), derived),
            kControlWeightTolerance);
}

TEST(CostsTest, SingularNoiseCannotDeriveR) {
  EXPECT_THROW(DeriveControlWeight(Eigen::Matrix2d::Zero(), 1.0),
               ValidationError);
  EXPECT_THROW(DeriveControlWeight(Eigen::Matrix2d::Identity(), 0.0),
               ValidationError);
}

TEST(CostsTest, ExitSet) {
  ExitSpec exit{10.0, std::nullopt};
  std::vector<Eigen::VectorXd> p = {Eigen::Vector2d(0, 0)};
  std::vector<Eigen::VectorXd> g = {Eigen::Vector2d(0, 0.5)};
  EXPECT_FALSE(exit.Exited(5.0, p, g));
  EXPECT_TRUE(exit.Exited(10.0, p, g));
  exit.goal_radius = 1.0;
  EXPECT_TRUE(exit.Exited(5.0, p, g));
}

}  // namespace
}  // namespace coop_pic
