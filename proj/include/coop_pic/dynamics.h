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

#ifndef COOP_PIC_DYNAMICS_H_
#define COOP_PIC_DYNAMICS_H_

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coop_pic/network.h"
#include "coop_pic/rng.h"

namespace coop_pic {

// per-agent state/input dimensions are bounded so scratch vectors live on
// the stack inside the integration and scoring loops
inline constexpr int kMaxAgentDim = 8;

using AgentVector =
    Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAgentDim, 1>;
using AgentMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                                  kMaxAgentDim, kMaxAgentDim>;

// which diffusion scale drives a step: the model noise (true world) or the
// exploration noise used for rollouts
enum class NoiseKind { kModel, kSampling };

// Single-agent controlled Ito diffusion
//
//   dx = f(x, t) dt + B(x) [u dt + sigma dw],   B(x) = [0; B_d(x)]
//
// The first U = state_dim - act_dim coordinates are not directly actuated;
// B is zero on those rows by construction, so a model only supplies the
// actuated block B_d.
class AgentModel {
 public:
  AgentModel(int state_dim, int input_dim, int act_dim, int position_dim,
             Eigen::MatrixXd noise, Eigen::MatrixXd sampling_noise);
  virtual ~AgentModel() = default;

  int state_dim() const { return state_dim_; }
  int input_dim() const { return input_dim_; }
  int act_dim() const { return act_dim_; }
  int nonact_dim() const { return state_dim_ - act_dim_; }
  // leading coordinates that form the planar (or scalar) position
  int position_dim() const { return position_dim_; }

  const Eigen::MatrixXd& noise() const { return noise_; }
  const Eigen::MatrixXd& sampling_noise() const { return sampling_noise_; }
  const Eigen::MatrixXd& noise(NoiseKind kind) const {
    return kind == NoiseKind::kModel ? noise_ : sampling_noise_;
  }

  // passive drift f(x, t), length state_dim
  virtual void Drift(const Eigen::Ref<const Eigen::VectorXd>& x, double t,
                     Eigen::Ref<Eigen::VectorXd> out) const = 0;

  // actuated rows B_d(x), act_dim x input_dim
  virtual void ActuatedControlMatrix(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     Eigen::Ref<Eigen::MatrixXd> out) const = 0;

  // true when B does not depend on the state, which lets scoring factor the
  // step weight matrix once per batch
  virtual bool constant_control_matrix() const { return false; }

  virtual std::string kind() const = 0;
  virtual std::vector<std::string> state_names() const = 0;
  virtual std::vector<std::string> input_names() const = 0;

  // full state_dim x input_dim control matrix [0; B_d]
  Eigen::MatrixXd ControlMatrix(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  int state_dim_;
  int input_dim_;
  int act_dim_;
  int position_dim_;
  Eigen::MatrixXd noise_;
  Eigen::MatrixXd sampling_noise_;
};

// planar unicycle (x, y, v, phi) with inputs (acceleration, turn rate)
class UnicycleModel final : public AgentModel {
 public:
  // noise = diag(sigma, nu); sampling noise = diag(sigma_s, nu_s)
  UnicycleModel(double sigma, double nu, double sigma_s, double nu_s);

  void Drift(const Eigen::Ref<const Eigen::VectorXd>& x, double t,
             Eigen::Ref<Eigen::VectorXd> out) const override;
  void ActuatedControlMatrix(const Eigen::Ref<const Eigen::VectorXd>& x,
                             Eigen::Ref<Eigen::MatrixXd> out) const override;
  bool constant_control_matrix() const override { return true; }
  std::string kind() const override { return "unicycle"; }
  std::vector<std::string> state_names() const override {
    return {"x", "y", "v", "phi"};
  }
  std::vector<std::string> input_names() const override {
    return {"u", "omega"};
  }
};

// scalar integrator dx = u dt + sigma dw (fully actuated, zero drift)
class ScalarIntegratorModel final : public AgentModel {
 public:
  ScalarIntegratorModel(double sigma, double sigma_s);

  void Drift(const Eigen::Ref<const Eigen::VectorXd>& x, double t,
             Eigen::Ref<Eigen::VectorXd> out) const override;
  void ActuatedControlMatrix(const Eigen::Ref<const Eigen::VectorXd>& x,
                             Eigen::Ref<Eigen::MatrixXd> out) const override;
  bool constant_control_matrix() const override { return true; }
  std::string kind() const override { return "integrator1d"; }
  std::vector<std::string> state_names() const override { return {"x"}; }
  std::vector<std::string> input_names() const override { return {"u"}; }
};

// Joint state of a subsystem: member blocks stacked in the subsystem's
// canonical order.
struct JointState {
  Subsystem subsystem;
  Eigen::VectorXd values;
};

// Stacked dynamics of n homogeneous, mutually independent agents.
// All joint vectors here are laid out member-major: block j occupies
// [j*M, (j+1)*M) for states, [j*P, ...) for inputs, [j*D, ...) for the
// actuated sub-stack.
class JointDynamics {
 public:
  JointDynamics(std::shared_ptr<const AgentModel> model, int members);

  const AgentModel& model() const { return *model_; }
  const std::shared_ptr<const AgentModel>& model_ptr() const { return model_; }
  int members() const { return members_; }
  int state_dim() const { return members_ * model_->state_dim(); }
  int input_dim() const { return members_ * model_->input_dim(); }
  int act_dim() const { return members_ * model_->act_dim(); }

  // f̄(x̄, t)
  Eigen::VectorXd Drift(const Eigen::Ref<const Eigen::VectorXd>& x,
                        double t) const;
  // f̄_(d)(x̄, t), the actuated rows of the stacked drift
  void ActuatedDrift(const Eigen::Ref<const Eigen::VectorXd>& x, double t,
                     Eigen::Ref<Eigen::VectorXd> out) const;

  // block-diagonal B̄(x̄), (M n) x (P n)
  Eigen::MatrixXd ControlMatrix(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // block-diagonal B̄_(d)(x̄), (D n) x (P n)
  Eigen::MatrixXd ActuatedControlMatrix(
      const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // block-diagonal σ̄ for the chosen noise
  Eigen::MatrixXd NoiseMatrix(NoiseKind kind) const;

  // x̄_(d): actuated coordinates of every member
  void Actuated(const Eigen::Ref<const Eigen::VectorXd>& x,
                Eigen::Ref<Eigen::VectorXd> out) const;

  // One Euler-Maruyama step
  //   x' = x + (f̄ + B̄ ū) ε + B̄ σ̄ sqrt(ε) ξ,  ξ ~ N(0, I_{P n})
  // `control` may be empty (zero control). Writes into `out`, which may
  // alias `x`. Throws IntegrationError on a non-finite result.
  void Step(const Eigen::Ref<const Eigen::VectorXd>& x,
            const Eigen::Ref<const Eigen::VectorXd>& control, NoiseKind noise,
            double t, double eps, RandomStream& rng,
            Eigen::Ref<Eigen::VectorXd> out) const;

  void CheckState(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  std::shared_ptr<const AgentModel> model_;
  int members_;
};

// free-function forms of the joint operations
Eigen::VectorXd JointDrift(const JointDynamics& dyn, const JointState& s,
                           double t);
Eigen::MatrixXd JointControlMatrix(const JointDynamics& dyn,
                                   const JointState& s);
JointState EulerMaruyamaStep(const JointDynamics& dyn, const JointState& s,
                             const Eigen::VectorXd& control, NoiseKind noise,
                             double t, double eps, RandomStream& rng);

}  // namespace coop_pic

#endif  // COOP_PIC_DYNAMICS_H_
