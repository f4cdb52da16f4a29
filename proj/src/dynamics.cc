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
#include <utility>

#include <fmt/format.h>

#include "coop_pic/error.h"

namespace coop_pic {
namespace {

void CheckNoise(const Eigen::MatrixXd& m, int p, const char* name) {
  if (m.rows() != p || m.cols() != p) {
    throw DimensionError(fmt::format("{} must be {}x{}, got {}x{}", name, p, p,
                                     m.rows(), m.cols()));
  }
  if (!m.allFinite()) throw DimensionError(fmt::format("{} not finite", name));
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.norm())) {
    throw DimensionError(fmt::format("{} must be symmetric", name));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.eigenvalues().minCoeff() < -1e-12 * (1.0 + m.norm())) {
    throw DimensionError(fmt::format("{} must be positive semi-definite", name));
  }
}

}  // namespace

AgentModel::AgentModel(int state_dim, int input_dim, int act_dim,
                       int position_dim, Eigen::MatrixXd noise,
                       Eigen::MatrixXd sampling_noise)
    : state_dim_(state_dim),
      input_dim_(input_dim),
      act_dim_(act_dim),
      position_dim_(position_dim),
      noise_(std::move(noise)),
      sampling_noise_(std::move(sampling_noise)) {
  if (state_dim < 1 || state_dim > kMaxAgentDim || input_dim < 1 ||
      input_dim > kMaxAgentDim) {
    throw DimensionError("agent state/input dimension out of range");
  }
  if (act_dim < 1 || act_dim > state_dim || act_dim > input_dim) {
    throw DimensionError("actuated dimension must lie in [1, min(M, P)]");
  }
  if (position_dim < 1 || position_dim > state_dim) {
    throw DimensionError("position dimension out of range");
  }
  CheckNoise(noise_, input_dim, "noise");
  CheckNoise(sampling_noise_, input_dim, "sampling noise");
}

Eigen::MatrixXd AgentModel::ControlMatrix(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(state_dim_, input_dim_);
  Eigen::MatrixXd bd(act_dim_, input_dim_);
  ActuatedControlMatrix(x, bd);
  b.bottomRows(act_dim_) = bd;
  return b;
}

// ----- unicycle ----- //

UnicycleModel::UnicycleModel(double sigma, double nu, double sigma_s,
                             double nu_s)
    : AgentModel(4, 2, 2, 2, Eigen::Vector2d(sigma, nu).asDiagonal(),
                 Eigen::Vector2d(sigma_s, nu_s).asDiagonal()) {}

void UnicycleModel::Drift(const Eigen::Ref<const Eigen::VectorXd>& x,
                          double /*t*/, Eigen::Ref<Eigen::VectorXd> out) const {
  double v = x[2], phi = x[3];
  out[0] = v * std::cos(phi);
  out[1] = v * std::sin(phi);
  out[2] = 0.0;
  out[3] = 0.0;
}

void UnicycleModel::ActuatedControlMatrix(
    const Eigen::Ref<const Eigen::VectorXd>& /*x*/,
    Eigen::Ref<Eigen::MatrixXd> out) const {
  out.setIdentity();
}

// ----- scalar integrator ----- //

ScalarIntegratorModel::ScalarIntegratorModel(double sigma, double sigma_s)
    : AgentModel(1, 1, 1, 1, Eigen::MatrixXd::Constant(1, 1, sigma),
                 Eigen::MatrixXd::Constant(1, 1, sigma_s)) {}

void ScalarIntegratorModel::Drift(const Eigen::Ref<const Eigen::VectorXd>&,
                                  double, Eigen::Ref<Eigen::VectorXd> out) const {
  out[0] = 0.0;
}

void ScalarIntegratorModel::ActuatedControlMatrix(
    const Eigen::Ref<const Eigen::VectorXd>&,
    Eigen::Ref<Eigen::MatrixXd> out) const {
  out(0, 0) = 1.0;
}

// ----- joint dynamics ----- //

JointDynamics::JointDynamics(std::shared_ptr<const AgentModel> model,
                             int members)
    : model_(std::move(model)), members_(members) {
  if (!model_) throw DimensionError("joint dynamics needs an agent model");
  if (members_ < 1) throw DimensionError("subsystem needs at least one member");
}

void JointDynamics::CheckState(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != state_dim()) {
    throw DimensionError(fmt::format("joint state has length {}, expected {}",
                                     x.size(), state_dim()));
  }
}

Eigen::VectorXd JointDynamics::Drift(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     double t) const {
  CheckState(x);
  const int m = model_->state_dim();
  Eigen::VectorXd out(state_dim());
  for (int j = 0; j < members_; ++j) {
    model_->Drift(x.segment(j * m, m), t, out.segment(j * m, m));
  }
  return out;
}

void JointDynamics::ActuatedDrift(const Eigen::Ref<const Eigen::VectorXd>& x,
                                  double t,
                                  Eigen::Ref<Eigen::VectorXd> out) const {
  const int m = model_->state_dim();
  const int d = model_->act_dim();
  AgentVector f(m);
  for (int j = 0; j < members_; ++j) {
    model_->Drift(x.segment(j * m, m), t, f);
    out.segment(j * d, d) = f.tail(d);
  }
}

Eigen::MatrixXd JointDynamics::ControlMatrix(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  CheckState(x);
  const int m = model_->state_dim();
  const int p = model_->input_dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(state_dim(), input_dim());
  for (int j = 0; j < members_; ++j) {
    out.block(j * m, j * p, m, p) = model_->ControlMatrix(x.segment(j * m, m));
  }
  return out;
}

Eigen::MatrixXd JointDynamics::ActuatedControlMatrix(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  CheckState(x);
  const int m = model_->state_dim();
  const int p = model_->input_dim();
  const int d = model_->act_dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(act_dim(), input_dim());
  for (int j = 0; j < members_; ++j) {
    AgentMatrix bd(d, p);
    model_->ActuatedControlMatrix(x.segment(j * m, m), bd);
    out.block(j * d, j * p, d, p) = bd;
  }
  return out;
}

Eigen::MatrixXd JointDynamics::NoiseMatrix(NoiseKind kind) const {
  const int p = model_->input_dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(input_dim(), input_dim());
  for (int j = 0; j < members_; ++j) {
    out.block(j * p, j * p, p, p) = model_->noise(kind);
  }
  return out;
}

void JointDynamics::Actuated(const Eigen::Ref<const Eigen::VectorXd>& x,
                             Eigen::Ref<Eigen::VectorXd> out) const {
  const int m = model_->state_dim();
  const int d = model_->act_dim();
  for (int j = 0; j < members_; ++j) {
    out.segment(j * d, d) = x.segment(j * m + (m - d), d);
  }
}

void JointDynamics::Step(const Eigen::Ref<const Eigen::VectorXd>& x,
                         const Eigen::Ref<const Eigen::VectorXd>& control,
                         NoiseKind noise, double t, double eps,
                         RandomStream& rng,
                         Eigen::Ref<Eigen::VectorXd> out) const {
  CheckState(x);
  if (!(eps > 0.0)) throw DimensionError("step length must be positive");
  const bool has_control = control.size() > 0;
  if (has_control && control.size() != input_dim()) {
    throw DimensionError(fmt::format("joint control has length {}, expected {}",
                                     control.size(), input_dim()));
  }
  if (out.size() != state_dim()) {
    throw DimensionError("output state has wrong length");
  }
  const int m = model_->state_dim();
  const int p = model_->input_dim();
  const int d = model_->act_dim();
  const double sqrt_eps = std::sqrt(eps);
  const Eigen::MatrixXd& sigma = model_->noise(noise);

  AgentVector f(m);
  AgentVector xi(p);
  AgentVector push(p);
  AgentMatrix bd(d, p);
  for (int j = 0; j < members_; ++j) {
    // draws are consumed in member order, P per member
    for (int c = 0; c < p; ++c) xi[c] = rng.StandardNormal();
    model_->Drift(x.segment(j * m, m), t, f);
    model_->ActuatedControlMatrix(x.segment(j * m, m), bd);
    push.noalias() = sigma * xi;
    push *= sqrt_eps;
    if (has_control) push += control.segment(j * p, p) * eps;
    // non-actuated rows get drift only; B is zero there
    AgentVector next = x.segment(j * m, m) + f * eps;
    next.tail(d) += bd * push;
    out.segment(j * m, m) = next;
  }
  if (!out.allFinite()) {
    throw IntegrationError(
        fmt::format("non-finite state after Euler-Maruyama step at t={}", t));
  }
}

Eigen::VectorXd JointDrift(const JointDynamics& dyn, const JointState& s,
                           double t) {
  if (s.subsystem.size() != dyn.members()) {
    throw DimensionError("joint state and dynamics disagree on member count");
  }
  return dyn.Drift(s.values, t);
}

Eigen::MatrixXd JointControlMatrix(const JointDynamics& dyn,
                                   const JointState& s) {
  if (s.subsystem.size() != dyn.members()) {
    throw DimensionError("joint state and dynamics disagree on member count");
  }
  return dyn.ControlMatrix(s.values);
}

JointState EulerMaruyamaStep(const JointDynamics& dyn, const JointState& s,
                             const Eigen::VectorXd& control, NoiseKind noise,
                             double t, double eps, RandomStream& rng) {
  if (s.subsystem.size() != dyn.members()) {
    throw DimensionError("joint state and dynamics disagree on member count");
  }
  JointState next{s.subsystem, Eigen::VectorXd(s.values.size())};
  dyn.Step(s.values, control, noise, t, eps, rng, next.values);
  return next;
}

}  // namespace coop_pic
