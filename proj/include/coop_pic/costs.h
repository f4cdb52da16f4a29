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

#ifndef COOP_PIC_COSTS_H_
#define COOP_PIC_COSTS_H_

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "coop_pic/network.h"

namespace coop_pic {

// axis-aligned box in position space; inside means lo <= p <= hi
struct Obstacle {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  double penalty = 0.0;

  bool Contains(const Eigen::Ref<const Eigen::VectorXd>& position) const;
};

enum class TerminalKind { kZero, kQuadratic };

// phi = kappa * sum_j |p_j - goal_j|^2 over subsystem members, or 0
struct TerminalCostSpec {
  TerminalKind kind = TerminalKind::kZero;
  double kappa = 0.0;
};

using AgentPair = std::pair<int, int>;

// Scenario-wide cost description. Indices are zero-based agents; pair maps
// are keyed by ordered (i, j).
struct CostSpec {
  std::vector<double> goal_weights;            // w_ii
  std::map<AgentPair, double> pair_weights;    // w_ij, absent = 0
  std::vector<Eigen::VectorXd> goals;          // full exit states
  std::vector<double> goal_regularizers;       // d_i^max
  std::map<AgentPair, double> pair_regularizers;  // d_ij^max, absent = 0
  std::vector<Obstacle> obstacles;
  TerminalCostSpec terminal;
  double lambda = 1.0;

  double PairWeight(int i, int j) const;
  double PairRegularizer(int i, int j) const;
};

// State cost seen by the path-integral machinery: running q(x̄, t),
// terminal phi(x̄), and the gradient of q over the full joint state.
class StateCost {
 public:
  virtual ~StateCost() = default;

  virtual double Running(const Eigen::Ref<const Eigen::VectorXd>& x,
                         double t) const = 0;
  virtual double Terminal(const Eigen::Ref<const Eigen::VectorXd>& x) const = 0;

  // analytic gradient when available, central differences otherwise
  virtual void RunningGradient(const Eigen::Ref<const Eigen::VectorXd>& x,
                               double t, Eigen::Ref<Eigen::VectorXd> grad) const;
  virtual bool has_analytic_gradient() const { return false; }

  // running-cost gradient by central differences with step
  // 1e-5 * max(1, |x|)
  void FiniteDifferenceGradient(const Eigen::Ref<const Eigen::VectorXd>& x,
                                double t, Eigen::Ref<Eigen::VectorXd> grad) const;
};

// Running and terminal cost of one factorial subsystem:
//
//   q_i = w_ii (|p_i - g_i| - d_i) + sum_{j in N_i} w_ij (|p_i - p_j| - d_ij)
//
// replaced by the obstacle penalty when the center is inside an obstacle,
// then clamped at zero from below.
class SubsystemCost final : public StateCost {
 public:
  SubsystemCost(const CostSpec& spec, Subsystem subsystem, int state_dim,
                int position_dim);

  double Running(const Eigen::Ref<const Eigen::VectorXd>& x,
                 double t) const override;
  double Terminal(const Eigen::Ref<const Eigen::VectorXd>& x) const override;
  void RunningGradient(const Eigen::Ref<const Eigen::VectorXd>& x, double t,
                       Eigen::Ref<Eigen::VectorXd> grad) const override;
  bool has_analytic_gradient() const override { return true; }

  // unclamped distance part of q (no obstacle override); exposed for the
  // gradient checker, which must avoid the clamp and obstacle kinks
  double RawDistanceCost(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // penalty of the obstacle containing the center, if any
  std::optional<double> ObstaclePenalty(
      const Eigen::Ref<const Eigen::VectorXd>& x) const;

  const Subsystem& subsystem() const { return subsystem_; }
  const Eigen::VectorXd& center_goal() const {
    return member_goal_positions_[0];
  }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  int position_dim() const { return position_dim_; }
  int state_dim() const { return state_dim_; }

 private:
  struct PairTerm {
    int member = 0;  // position in the subsystem
    double weight = 0.0;
    double regularizer = 0.0;
  };

  Subsystem subsystem_;
  int state_dim_;
  int position_dim_;
  double goal_weight_;
  double goal_regularizer_;
  std::vector<Eigen::VectorXd> member_goal_positions_;
  std::vector<PairTerm> pairs_;
  std::vector<Obstacle> obstacles_;
  TerminalCostSpec terminal_;
};

// convenience wrappers matching the operation names
double RunningCost(const SubsystemCost& cost,
                   const Eigen::Ref<const Eigen::VectorXd>& x, double t);
double TerminalCost(const SubsystemCost& cost,
                    const Eigen::Ref<const Eigen::VectorXd>& x);

// R = lambda (sigma sigma^T)^{-1}; throws ValidationError when sigma sigma^T
// is singular or lambda <= 0
Eigen::MatrixXd DeriveControlWeight(const Eigen::MatrixXd& sigma, double lambda);

// |supplied - derived| / |derived| (Frobenius)
double ControlWeightMismatch(const Eigen::MatrixXd& supplied,
                             const Eigen::MatrixXd& derived);

inline constexpr double kControlWeightTolerance = 1e-6;

// Exit set: time-only by default, optionally the first time every agent is
// within `goal_radius` of its goal position.
struct ExitSpec {
  double t_final = 0.0;
  std::optional<double> goal_radius;

  bool Exited(double t, const std::vector<Eigen::VectorXd>& positions,
              const std::vector<Eigen::VectorXd>& goal_positions) const;
};

}  // namespace coop_pic

#endif  // COOP_PIC_COSTS_H_
