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

#include "coop_pic/dynamics.h"

#include <cmath>
#include <memory>
#include <numbers>

#include <gtest/gtest.h>

#include "coop_pic/error.h"
#include "coop_pic/pic.h"

namespace coop_pic {
namespace {

std::shared_ptr<const AgentModel> Uav(double s = 0.0, double n = 0.0,
                                      double ss = 0.0, double ns = 0.0) {
  return std::make_shared<UnicycleModel>(s, n, ss, ns);
}

TEST(DynamicsTest, UnicycleDrift) {
  JointDynamics dyn(Uav(), 1);
  Eigen::Vector4d x(0, 0, 1, 0);
  EXPECT_TRUE(dyn.Drift(x, 0.0).isApprox(Eigen::Vector4d(1, 0, 0, 0)));
  Eigen::Vector4d y(0, 0, 2, std::numbers::pi / 2);
  Eigen::VectorXd f = dyn.Drift(y, 0.0);
  EXPECT_NEAR(f(0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(f(1), 2.0);
  EXPECT_DOUBLE_EQ(f(2), 0.0);
  EXPECT_DOUBLE_EQ(f(3), 0.0);
}

TEST(DynamicsTest, RestingAgentsHaveZeroDrift) {
  JointDynamics dyn(Uav(), 2);
  Eigen::VectorXd x(8);
  x << 1, 2, 0, 0.3, -4, 5, 0, 2.0;
  EXPECT_TRUE(dyn.Drift(x, 0.0).isZero(0.0));
}

TEST(DynamicsTest, ControlMatrices) {
  JointDynamics one(Uav(), 1);
  Eigen::MatrixXd b = one.ControlMatrix(Eigen::Vector4d::Zero());
  ASSERT_EQ(b.rows(), 4);
  ASSERT_EQ(b.cols(), 2);
  EXPECT_TRUE(b.topRows(2).isZero(0.0));
  EXPECT_TRUE(b.bottomRows(2).isIdentity(0.0));

  JointDynamics two(Uav(), 2);
  Eigen::MatrixXd bb = two.ControlMatrix(Eigen::VectorXd::Zero(8));
  ASSERT_EQ(bb.rows(), 8);
  ASSERT_EQ(bb.cols(), 4);
  EXPECT_TRUE(bb.block(0, 0, 4, 2).isApprox(b));
  EXPECT_TRUE(bb.block(4, 2, 4, 2).isApprox(b));
  EXPECT_TRUE(bb.block(0, 2, 4, 2).isZero(0.0));
  EXPECT_TRUE(bb.block(4, 0, 4, 2).isZero(0.0));
  EXPECT_TRUE(two.ActuatedControlMatrix(Eigen::VectorXd::Zero(8))
                  .isIdentity(0.0));
}

TEST(DynamicsTest, NoiselessStepIsEuler) {
  JointDynamics dyn(Uav(), 1);
  RandomStream rng(1);
  Eigen::Vector4d rest(3, 4, 0, 1);
  Eigen::VectorXd out(4);
  dyn.Step(rest, Eigen::VectorXd(), NoiseKind::kModel, 0.0, 0.5, rng, out);
  EXPECT_EQ(out, Eigen::VectorXd(rest));

  JointState s{Subsystem{0, {0}}, Eigen::Vector4d(0, 0, 1, 0)};
  JointState next = EulerMaruyamaStep(dyn, s, Eigen::VectorXd(),
                                      NoiseKind::kModel, 0.0, 0.5, rng);
  EXPECT_TRUE(next.values.isApprox(Eigen::Vector4d(0.5, 0, 1, 0)));
}

TEST(DynamicsTest, ControlEntersActuatedRows) {
  JointDynamics dyn(Uav(), 1);
  RandomStream rng(1);
  Eigen::VectorXd out(4);
  dyn.Step(Eigen::Vector4d(0, 0, 1, 0), Eigen::Vector2d(2, -1),
           NoiseKind::kModel, 0.0, 0.1, rng, out);
  EXPECT_TRUE(out.isApprox(Eigen::Vector4d(0.1, 0, 1.2, -0.1)));
}

TEST(DynamicsTest, IncrementCovarianceMatchesStepWeight) {
  JointDynamics dyn(Uav(0.1, 0.05, 0.75, 0.65), 1);
  const double eps = 0.2;
  const int n = 100000;
  Eigen::Vector4d x(1, 2, 1.5, 0.4);
  Eigen::VectorXd fd(2);
  dyn.ActuatedDrift(x, 0.0, fd);
  Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
  RandomStream rng(42);
  Eigen::VectorXd out(4);
  for (int k = 0; k < n; ++k) {
    dyn.Step(x, Eigen::VectorXd(), NoiseKind::kSampling, 0.0, eps, rng, out);
    Eigen::Vector2d d = out.tail(2) - x.tail(2) - fd * eps;
    sum += d * d.transpose();
  }
  Eigen::Matrix2d cov = sum / n;
  Eigen::Matrix2d expected = eps * StepWeightMatrix(dyn, x).h;
  EXPECT_NEAR(cov(0, 0) / expected(0, 0), 1.0, 0.03);
  EXPECT_NEAR(cov(1, 1) / expected(1, 1), 1.0, 0.03);
  EXPECT_NEAR(cov(0, 1), 0.0, 0.03 * std::sqrt(expected(0, 0) * expected(1, 1)));
}

TEST(DynamicsTest, NonFiniteStateThrows) {
  JointDynamics dyn(Uav(), 1);
  RandomStream rng(1);
  Eigen::VectorXd out(4);
  Eigen::Vector4d bad(0, 0, std::nan(""), 0);
  EXPECT_THROW(
      dyn.Step(bad, Eigen::VectorXd(), NoiseKind::kModel, 0.0, 0.1, rng, out),
      IntegrationError);
}

TEST(DynamicsTest, ScalarIntegrator) {
  JointDynamics dyn(std::make_shared<ScalarIntegratorModel>(0.0, 0.0), 1);
  RandomStream rng(1);
  Eigen::VectorXd out(1);
  dyn.Step(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 2.0),
           NoiseKind::kModel, 0.0, 0.25, rng, out);
  EXPECT_DOUBLE_EQ(out(0), 1.5);
}

}  // namespace
}  // namespace coop_pic
