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

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "coop_pic/error.h"

namespace coop_pic {
namespace {

// Path value with an optional precomputed H (valid when B is constant).
PathValue EvaluatePathValueImpl(const StateCost& cost, const JointDynamics& dyn,
                                const Rollout& rollout, double lambda,
                                const StepWeight* fixed) {
  const int segments = rollout.segments();
  if (segments < 1) throw DimensionError("rollout has no segments");
  if (rollout.states.rows() != dyn.state_dim()) {
    throw DimensionError(fmt::format("rollout rows {} != joint dimension {}",
                                     rollout.states.rows(), dyn.state_dim()));
  }
  if (!(lambda > 0.0)) throw ScoringError("lambda must be positive");
  const double eps = rollout.eps;
  const int nd = dyn.act_dim();

  Eigen::VectorXd xd(nd), xd_next(nd), fd(nd), alpha(nd), tmp(nd);
  double running = 0.0, quadratic = 0.0, log_det = 0.0;
  std::optional<StepWeight> local;
  for (int k = 0; k < segments; ++k) {
    auto xk = rollout.states.col(k);
    const double tk = rollout.t0 + k * eps;
    running += cost.Running(xk, tk);
    const StepWeight* sw = fixed;
    if (sw == nullptr) {
      local = StepWeightMatrix(dyn, xk);
      sw = &*local;
    }
    dyn.Actuated(xk, xd);
    dyn.Actuated(rollout.states.col(k + 1), xd_next);
    dyn.ActuatedDrift(xk, tk, fd);
    alpha = (xd_next - xd) / eps - fd;
    tmp.noalias() = sw->h_inv * alpha;
    quadratic += alpha.dot(tmp);
    log_det += sw->log_det;
  }
  PathValue pv;
  pv.lambda = lambda;
  pv.terminal = cost.Terminal(rollout.states.col(segments)) / lambda;
  pv.running = eps / lambda * running;
  pv.quadratic = 0.5 * eps * quadratic;
  pv.log_det = 0.5 * log_det;
  if (!std::isfinite(pv.generalized())) {
    throw ScoringError("non-finite path value");
  }
  return pv;
}

Eigen::VectorXd InitialControlImpl(const StateCost& cost,
                                   const JointDynamics& dyn,
                                   const Rollout& rollout, double lambda,
                                   const StepWeight& h0) {
  if (rollout.segments() < 1) throw DimensionError("rollout has no segments");
  const double eps = rollout.eps;
  const int nd = dyn.act_dim();
  auto x0 = rollout.states.col(0);
  Eigen::VectorXd grad(dyn.state_dim());
  cost.RunningGradient(x0, rollout.t0, grad);
  Eigen::VectorXd grad_d(nd), xd(nd), xd_next(nd), fd(nd);
  dyn.Actuated(grad, grad_d);
  dyn.Actuated(x0, xd);
  dyn.Actuated(rollout.states.col(1), xd_next);
  dyn.ActuatedDrift(x0, rollout.t0, fd);
  Eigen::VectorXd alpha = (xd_next - xd) / eps - fd;
  Eigen::VectorXd u = -(eps / lambda) * grad_d;
  u.noalias() += h0.h_inv * alpha;
  return u;
}

// With zero sampling noise every rollout is the passive trajectory and the
// premultiplier sigma sigma^T of the estimator vanishes, so the control is
// exactly zero; H is never formed.
PlanResult PlanWithoutExploration(const StateCost& cost,
                                  const JointDynamics& dyn,
                                  const RolloutBatch& batch, double lambda,
                                  const PlanOptions& options) {
  PlanResult result;
  std::vector<double> exponents(batch.size());
  result.scores.resize(batch.size());
  for (int y = 0; y < batch.size(); ++y) {
    const Rollout& r = batch.rollouts[y];
    double running = 0.0;
    for (int k = 0; k < r.segments(); ++k) {
      running += cost.Running(r.states.col(k), r.t0 + k * r.eps);
    }
    exponents[y] = cost.Terminal(r.states.col(r.segments())) / lambda +
                   r.eps / lambda * running;
    result.scores[y].s_tilde = exponents[y];
    result.scores[y].u_tilde = Eigen::VectorXd::Zero(dyn.act_dim());
  }
  PathDistribution dist = PathDistributionFromScores(exponents);
  result.estimate.joint = Eigen::VectorXd::Zero(dyn.input_dim());
  result.estimate.local = Eigen::VectorXd::Zero(dyn.model().input_dim());
  result.estimate.weights = dist.probs;
  result.estimate.ess = dist.ess;
  result.s_min = *std::min_element(exponents.begin(), exponents.end());
  double sum = 0.0;
  for (double v : exponents) sum += v;
  result.s_mean = sum / static_cast<double>(exponents.size());
  result.ess_low = dist.ess < options.ess_warning_fraction * batch.size();
  return result;
}

}  // namespace

StepWeight StepWeightMatrix(const JointDynamics& dyn,
                            const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::MatrixXd bd = dyn.ActuatedControlMatrix(x);
  Eigen::MatrixXd sigma = dyn.NoiseMatrix(NoiseKind::kSampling);
  Eigen::MatrixXd bs = bd * sigma;
  StepWeight sw;
  sw.h = bs * bs.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(sw.h);
  if (llt.info() != Eigen::Success) {
    throw ScoringError(
        "step weight matrix H is not positive definite (check sampling noise "
        "on actuated channels)");
  }
  const Eigen::MatrixXd& l = llt.matrixLLT();
  double log_det = 0.0;
  for (int c = 0; c < l.rows(); ++c) log_det += 2.0 * std::log(l(c, c));
  if (!std::isfinite(log_det)) {
    throw ScoringError("step weight matrix H is numerically singular");
  }
  sw.log_det = log_det;
  sw.h_inv = llt.solve(Eigen::MatrixXd::Identity(sw.h.rows(), sw.h.cols()));
  return sw;
}

std::string ToString(PathWeighting w) {
  switch (w) {
    case PathWeighting::kGeneralizedPathValue:
      return "generalized";
    case PathWeighting::kUnscaledQuadratic:
      return "unscaled_quadratic";
    case PathWeighting::kPassiveCorrected:
      return "passive_corrected";
  }
  return "unknown";
}

PathWeighting ParsePathWeighting(const std::string& name) {
  if (name == "generalized") return PathWeighting::kGeneralizedPathValue;
  if (name == "unscaled_quadratic") return PathWeighting::kUnscaledQuadratic;
  if (name == "passive_corrected") return PathWeighting::kPassiveCorrected;
  throw ValidationError("planner.weighting",
                        fmt::format("unknown path weighting '{}'", name));
}

double PathValue::Score(PathWeighting weighting) const {
  switch (weighting) {
    case PathWeighting::kGeneralizedPathValue:
      return generalized();
    case PathWeighting::kUnscaledQuadratic:
      return terminal + running + quadratic + log_det;
    case PathWeighting::kPassiveCorrected:
      return terminal + running;
  }
  return generalized();
}

PathValue EvaluatePathValue(const StateCost& cost, const JointDynamics& dyn,
                            const Rollout& rollout, double lambda) {
  if (dyn.model().constant_control_matrix()) {
    StepWeight fixed = StepWeightMatrix(dyn, rollout.states.col(0));
    return EvaluatePathValueImpl(cost, dyn, rollout, lambda, &fixed);
  }
  return EvaluatePathValueImpl(cost, dyn, rollout, lambda, nullptr);
}

double GeneralizedPathValue(const StateCost& cost, const JointDynamics& dyn,
                            const Rollout& rollout, double lambda) {
  return EvaluatePathValue(cost, dyn, rollout, lambda).generalized();
}

Eigen::VectorXd InitialControl(const StateCost& cost, const JointDynamics& dyn,
                               const Rollout& rollout, double lambda) {
  StepWeight h0 = StepWeightMatrix(dyn, rollout.states.col(0));
  return InitialControlImpl(cost, dyn, rollout, lambda, h0);
}

PathDistribution PathDistributionFromScores(std::span<const double> scores) {
  if (scores.empty()) throw ScoringError("no path values to normalize");
  double lowest = std::numeric_limits<double>::infinity();
  for (double s : scores) {
    if (!std::isfinite(s)) throw ScoringError("non-finite path value");
    lowest = std::min(lowest, s);
  }
  PathDistribution dist;
  dist.probs.resize(scores.size());
  double total = 0.0;
  for (std::size_t y = 0; y < scores.size(); ++y) {
    dist.probs[y] = std::exp(-(scores[y] - lowest));
    total += dist.probs[y];
  }
  double sum_sq = 0.0;
  for (double& p : dist.probs) {
    p /= total;
    sum_sq += p * p;
  }
  dist.ess = 1.0 / sum_sq;
  return dist;
}

ControlEstimate EstimateControl(const JointDynamics& dyn,
                                const Eigen::Ref<const Eigen::VectorXd>& x0,
                                const std::vector<Eigen::VectorXd>& u_tildes,
                                const PathDistribution& distribution) {
  if (u_tildes.size() != distribution.probs.size()) {
    throw DimensionError("one initial control vector per rollout is required");
  }
  const int nd = dyn.act_dim();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(nd);
  for (std::size_t y = 0; y < u_tildes.size(); ++y) {
    if (u_tildes[y].size() != nd) {
      throw DimensionError("initial control vector has the wrong length");
    }
    mean += distribution.probs[y] * u_tildes[y];
  }
  Eigen::MatrixXd sigma = dyn.NoiseMatrix(NoiseKind::kSampling);
  Eigen::MatrixXd bd = dyn.ActuatedControlMatrix(x0);
  ControlEstimate est;
  est.joint = sigma * sigma.transpose() * bd.transpose() * mean;
  est.local = est.joint.head(dyn.model().input_dim());
  est.weights = distribution.probs;
  est.ess = distribution.ess;
  return est;
}

PlanResult PlanSubsystem(const StateCost& cost, const JointDynamics& dyn,
                         const RolloutBatch& batch, double lambda,
                         const PlanOptions& options) {
  if (batch.size() < 1) throw ScoringError("empty rollout batch");
  if (batch.subsystem.size() != dyn.members()) {
    throw DimensionError("batch and dynamics disagree on member count");
  }
  if (dyn.NoiseMatrix(NoiseKind::kSampling).isZero(0.0)) {
    return PlanWithoutExploration(cost, dyn, batch, lambda, options);
  }
  const bool constant_b = dyn.model().constant_control_matrix();
  std::optional<StepWeight> fixed;
  if (constant_b) fixed = StepWeightMatrix(dyn, batch.rollouts[0].states.col(0));

  PlanResult result;
  result.scores.resize(batch.size());
  std::vector<double> exponents(batch.size());
  std::vector<Eigen::VectorXd> u_tildes(batch.size());
  for (int y = 0; y < batch.size(); ++y) {
    const Rollout& r = batch.rollouts[y];
    PathValue pv = EvaluatePathValueImpl(cost, dyn, r, lambda,
                                         constant_b ? &*fixed : nullptr);
    exponents[y] = pv.Score(options.weighting);
    u_tildes[y] = constant_b
                      ? InitialControlImpl(cost, dyn, r, lambda, *fixed)
                      : InitialControl(cost, dyn, r, lambda);
    result.scores[y].s_tilde = exponents[y];
    result.scores[y].u_tilde = u_tildes[y];
  }
  PathDistribution dist = PathDistributionFromScores(exponents);
  result.estimate =
      EstimateControl(dyn, batch.rollouts[0].states.col(0), u_tildes, dist);
  result.s_min = *std::min_element(exponents.begin(), exponents.end());
  double sum = 0.0;
  for (double s : exponents) sum += s;
  result.s_mean = sum / static_cast<double>(exponents.size());
  result.ess_low = dist.ess < options.ess_warning_fraction * batch.size();
  return result;
}

}  // namespace coop_pic
