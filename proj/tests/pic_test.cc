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

#include "coop_pic/pic.h"

#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "coop_pic/error.h"

namespace coop_pic {
namespace {

class ConstantCost final : public StateCost {
 public:
  explicit ConstantCost(double q, double phi = 0.0) : q_(q), phi_(phi) {}
  double Running(const Eigen::Ref<const Eigen::VectorXd>&,
                 double) const override {
    return q_;
  }
  double Terminal(const Eigen::Ref<const Eigen::VectorXd>&) const override {
    return phi_;
  }

 private:
  double q_;
  double phi_;
};

JointDynamics Scalar(double sigma_s) {
  return JointDynamics(std::make_shared<ScalarIntegratorModel>(0.0, sigma_s),
                       1);
}

Rollout ScalarRollout(std::vector<double> xs, double eps) {
  Rollout r;
  r.states.resize(1, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k) r.states(0, k) = xs[k];
  r.eps = eps;
  return r;
}

TEST(PicTest, StepWeightIdentity) {
  StepWeight sw = StepWeightMatrix(Scalar(1.0), Eigen::VectorXd::Zero(1));
  EXPECT_EQ(sw.h(0, 0), 1.0);
  EXPECT_EQ(sw.log_det, 0.0);
}

TEST(PicTest, StepWeightTwoUnicycles) {
  JointDynamics dyn(std::make_shared<UnicycleModel>(0.1, 0.05, 0.75, 0.65), 2);
  StepWeight sw = StepWeightMatrix(dyn, Eigen::VectorXd::Zero(8));
  Eigen::Vector4d diag(0.5625, 0.4225, 0.5625, 0.4225);
  EXPECT_TRUE(sw.h.isApprox(Eigen::MatrixXd(diag.asDiagonal()), 1e-15));
  EXPECT_NEAR(sw.log_det, std::log(diag.prod()), 1e-14);
}

TEST(PicTest, StepWeightEqualsLambdaBRinvBt) {
  JointDynamics dyn(std::make_shared<UnicycleModel>(0.1, 0.05, 0.75, 0.65), 2);
  const double lambda = 2.5;
  Eigen::MatrixXd r = DeriveControlWeight(dyn.NoiseMatrix(NoiseKind::kSampling),
                                          lambda);
  Eigen::MatrixXd bd = dyn.ActuatedControlMatrix(Eigen::VectorXd::Zero(8));
  Eigen::MatrixXd expected = lambda * bd * r.inverse() * bd.transpose();
  StepWeight sw = StepWeightMatrix(dyn, Eigen::VectorXd::Zero(8));
  EXPECT_LT((sw.h - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PicTest, SingularStepWeightThrows) {
  EXPECT_THROW(StepWeightMatrix(Scalar(0.0), Eigen::VectorXd::Zero(1)),
               ScoringError);
}

TEST(PicTest, PathValueZeroForNoiselessTrivialRollout) {
  ConstantCost cost(0.0);
  EXPECT_EQ(GeneralizedPathValue(cost, Scalar(1.0),
                                 ScalarRollout({0, 0, 0}, 0.1), 1.0),
            0.0);
}

TEST(PicTest, PathValueArithmetic) {
  ConstantCost cost(0.0);
  // alpha = 0.3 / 0.1 = 3, H = 4
  double s = GeneralizedPathValue(cost, Scalar(2.0),
                                  ScalarRollout({0, 0.3}, 0.1), 1.0);
  EXPECT_NEAR(s, 0.1 / 2 * 9.0 / 4.0 + 0.5 * std::log(4.0), 1e-12);
  EXPECT_NEAR(s, 0.8056, 1e-4);
}

TEST(PicTest, TerminalConstantShiftsPathValue) {
  const double lambda = 0.5;
  Rollout r = ScalarRollout({0, 0.2, -0.1}, 0.1);
  double a = GeneralizedPathValue(ConstantCost(1.0, 0.0), Scalar(2.0), r, lambda);
  double b = GeneralizedPathValue(ConstantCost(1.0, 3.0), Scalar(2.0), r, lambda);
  EXPECT_NEAR(b - a, 3.0 / lambda, 1e-12);
}

TEST(PicTest, PathWeightings) {
  PathValue pv;
  pv.terminal = 1.0;
  pv.running = 2.0;
  pv.quadratic = 4.0;
  pv.log_det = 0.5;
  pv.lambda = 2.0;
  EXPECT_EQ(pv.Score(PathWeighting::kGeneralizedPathValue), 1 + 2 + 2 + 0.5);
  EXPECT_EQ(pv.Score(PathWeighting::kUnscaledQuadratic), 1 + 2 + 4 + 0.5);
  EXPECT_EQ(pv.Score(PathWeighting::kPassiveCorrected), 3.0);
  for (auto w : {PathWeighting::kGeneralizedPathValue,
                 PathWeighting::kUnscaledQuadratic,
                 PathWeighting::kPassiveCorrected}) {
    EXPECT_EQ(ParsePathWeighting(ToString(w)), w);
  }
  EXPECT_THROW(ParsePathWeighting("bogus"), ValidationError);
}

TEST(PicTest, InitialControlForConstantCost) {
  ConstantCost cost(5.0);
  EXPECT_EQ(InitialControl(cost, Scalar(2.0), ScalarRollout({1, 1}, 0.1), 1.0)(0),
            0.0);
  EXPECT_NEAR(
      InitialControl(cost, Scalar(2.0), ScalarRollout({0, 0.3}, 0.1), 1.0)(0),
      3.0 / 4.0, 1e-12);
}

TEST(PicTest, SoftmaxExamples) {
  std::vector<double> equal(5, 3.0);
  PathDistribution u = PathDistributionFromScores(equal);
  for (double p : u.probs) EXPECT_NEAR(p, 0.2, 1e-15);
  EXPECT_NEAR(u.ess, 5.0, 1e-12);

  std::vector<double> two = {0.0, std::log(2.0)};
  PathDistribution d = PathDistributionFromScores(two);
  EXPECT_NEAR(d.probs[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.probs[1], 1.0 / 3.0, 1e-15);

  std::vector<double> one = {42.0};
  EXPECT_EQ(PathDistributionFromScores(one).probs[0], 1.0);
}

TEST(PicTest, SoftmaxSurvivesLargeScores) {
  std::vector<double> big = {1e4, 1e4 + std::log(2.0)};
  PathDistribution d = PathDistributionFromScores(big);
  EXPECT_NEAR(d.probs[0], 2.0 / 3.0, 1e-12);
}

TEST(PicTest, SoftmaxRejectsBadInput) {
  std::vector<double> empty;
  EXPECT_THROW(PathDistributionFromScores(empty), ScoringError);
  std::vector<double> nan = {0.0, std::nan("")};
  EXPECT_THROW(PathDistributionFromScores(nan), ScoringError);
}

TEST(PicTest, EstimateControlDegenerateAndZero) {
  JointDynamics dyn = Scalar(2.0);
  std::vector<double> one = {0.0};
  PathDistribution single = PathDistributionFromScores(one);
  ControlEstimate e = EstimateControl(dyn, Eigen::VectorXd::Zero(1),
                                      {Eigen::VectorXd::Constant(1, 0.75)},
                                      single);
  EXPECT_NEAR(e.joint(0), 4.0 * 0.75, 1e-12);
  EXPECT_NEAR(e.local(0), 3.0, 1e-12);

  std::vector<double> scores = {0.0, 1.0, 2.0};
  ControlEstimate z = EstimateControl(
      dyn, Eigen::VectorXd::Zero(1),
      std::vector<Eigen::VectorXd>(3, Eigen::VectorXd::Zero(1)),
      PathDistributionFromScores(scores));
  EXPECT_EQ(z.joint(0), 0.0);
}

TEST(PicTest, PlanWithZeroSamplingNoiseIsZeroControl) {
  ConstantCost cost(1.0);
  JointDynamics dyn = Scalar(0.0);
  RolloutBatch batch;
  batch.subsystem = Subsystem{0, {0}};
  batch.rollouts = {ScalarRollout({1, 1, 1}, 0.5), ScalarRollout({1, 1, 1}, 0.5)};
  PlanResult plan = PlanSubsystem(cost, dyn, batch, 1.0);
  EXPECT_EQ(plan.estimate.local(0), 0.0);
  EXPECT_NEAR(plan.estimate.ess, 2.0, 1e-12);
}

}  // namespace
}  // namespace coop_pic
