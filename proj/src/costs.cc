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

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "coop_pic/error.h"

namespace coop_pic {

bool Obstacle::Contains(const Eigen::Ref<const Eigen::VectorXd>& position) const {
  for (int c = 0; c < lo.size(); ++c) {
    if (position[c] < lo[c] || position[c] > hi[c]) return false;
  }
  return true;
}

double CostSpec::PairWeight(int i, int j) const {
  auto it = pair_weights.find({i, j});
  return it == pair_weights.end() ? 0.0 : it->second;
}

double CostSpec::PairRegularizer(int i, int j) const {
  auto it = pair_regularizers.find({i, j});
  return it == pair_regularizers.end() ? 0.0 : it->second;
}

// ----- generic state cost ----- //

void StateCost::RunningGradient(const Eigen::Ref<const Eigen::VectorXd>& x,
                                double t,
                                Eigen::Ref<Eigen::VectorXd> grad) const {
  FiniteDifferenceGradient(x, t, grad);
}

void StateCost::FiniteDifferenceGradient(
    const Eigen::Ref<const Eigen::VectorXd>& x, double t,
    Eigen::Ref<Eigen::VectorXd> grad) const {
  const double h = 1e-5 * std::max(1.0, x.norm());
  Eigen::VectorXd probe = x;
  for (int c = 0; c < x.size(); ++c) {
    probe[c] = x[c] + h;
    double up = Running(probe, t);
    probe[c] = x[c] - h;
    double down = Running(probe, t);
    probe[c] = x[c];
    grad[c] = (up - down) / (2.0 * h);
  }
}

// ----- subsystem cost ----- //

SubsystemCost::SubsystemCost(const CostSpec& spec, Subsystem subsystem,
                             int state_dim, int position_dim)
    : subsystem_(std::move(subsystem)),
      state_dim_(state_dim),
      position_dim_(position_dim),
      obstacles_(spec.obstacles),
      terminal_(spec.terminal) {
  const int center = subsystem_.center;
  const auto n_agents = static_cast<int>(spec.goals.size());
  for (int a : subsystem_.members) {
    if (a < 0 || a >= n_agents) {
      throw IndexError(fmt::format("subsystem member {} has no goal", a + 1));
    }
  }
  auto at = [](const std::vector<double>& v, int i) {
    return i < static_cast<int>(v.size()) ? v[i] : 0.0;
  };
  goal_weight_ = at(spec.goal_weights, center);
  goal_regularizer_ = at(spec.goal_regularizers, center);
  for (int a : subsystem_.members) {
    member_goal_positions_.push_back(spec.goals[a].head(position_dim_));
  }
  for (int pos = 1; pos < subsystem_.size(); ++pos) {
    int j = subsystem_.members[pos];
    double w = spec.PairWeight(center, j);
    if (w != 0.0) pairs_.push_back({pos, w, spec.PairRegularizer(center, j)});
  }
}

double SubsystemCost::RawDistanceCost(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  auto center = x.head(position_dim_);
  double q = 0.0;
  if (goal_weight_ != 0.0) {
    q += goal_weight_ *
         ((center - member_goal_positions_[0]).norm() - goal_regularizer_);
  }
  for (const PairTerm& pair : pairs_) {
    auto other = x.segment(pair.member * state_dim_, position_dim_);
    q += pair.weight * ((center - other).norm() - pair.regularizer);
  }
  return q;
}

std::optional<double> SubsystemCost::ObstaclePenalty(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::optional<double> penalty;
  auto center = x.head(position_dim_);
  for (const Obstacle& ob : obstacles_) {
    if (ob.Contains(center)) {
      penalty = penalty ? std::max(*penalty, ob.penalty) : ob.penalty;
    }
  }
  return penalty;
}

double SubsystemCost::Running(const Eigen::Ref<const Eigen::VectorXd>& x,
                              double /*t*/) const {
  if (auto penalty = ObstaclePenalty(x)) return std::max(0.0, *penalty);
  return std::max(0.0, RawDistanceCost(x));
}

void SubsystemCost::RunningGradient(const Eigen::Ref<const Eigen::VectorXd>& x,
                                    double /*t*/,
                                    Eigen::Ref<Eigen::VectorXd> grad) const {
  grad.setZero();
  // flat inside obstacles and where the clamp binds
  if (ObstaclePenalty(x) || RawDistanceCost(x) < 0.0) return;
  auto center = x.head(position_dim_);
  if (goal_weight_ != 0.0) {
    Eigen::VectorXd diff = center - member_goal_positions_[0];
    double dist = diff.norm();
    if (dist > 0.0) grad.head(position_dim_) += goal_weight_ * diff / dist;
  }
  for (const PairTerm& pair : pairs_) {
    auto other = x.segment(pair.member * state_dim_, position_dim_);
    Eigen::VectorXd diff = center - other;
    double dist = diff.norm();
    if (dist == 0.0) continue;
    grad.head(position_dim_) += pair.weight * diff / dist;
    grad.segment(pair.member * state_dim_, position_dim_) -=
        pair.weight * diff / dist;
  }
}

double SubsystemCost::Terminal(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (terminal_.kind == TerminalKind::kZero) return 0.0;
  double phi = 0.0;
  for (int pos = 0; pos < subsystem_.size(); ++pos) {
    phi += (x.segment(pos * state_dim_, position_dim_) -
            member_goal_positions_[pos])
               .squaredNorm();
  }
  return terminal_.kappa * phi;
}

double RunningCost(const SubsystemCost& cost,
                   const Eigen::Ref<const Eigen::VectorXd>& x, double t) {
  return cost.Running(x, t);
}

double TerminalCost(const SubsystemCost& cost,
                    const Eigen::Ref<const Eigen::VectorXd>& x) {
  return cost.Terminal(x);
}

// ----- control weight ----- //

Eigen::MatrixXd DeriveControlWeight(const Eigen::MatrixXd& sigma,
                                    double lambda) {
  if (!(lambda > 0.0)) {
    throw ValidationError("costs.lambda", "lambda must be positive");
  }
  Eigen::MatrixXd cov = sigma * sigma.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, cov.norm())) {
    throw ValidationError("model.sampling_noise",
                          "sigma sigma^T is singular; cannot derive R");
  }
  Eigen::MatrixXd r =
      lambda * ldlt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
  return 0.5 * (r + r.transpose());
}

double ControlWeightMismatch(const Eigen::MatrixXd& supplied,
                             const Eigen::MatrixXd& derived) {
  if (supplied.rows() != derived.rows() || supplied.cols() != derived.cols()) {
    throw DimensionError("control weight has the wrong shape");
  }
  return (supplied - derived).norm() / derived.norm();
}

// ----- exit set ----- //

bool ExitSpec::Exited(double t, const std::vector<Eigen::VectorXd>& positions,
                      const std::vector<Eigen::VectorXd>& goal_positions) const {
  // tolerance absorbs accumulated cycle arithmetic
  if (t >= t_final - 1e-9) return true;
  if (!goal_radius) return false;
  for (std::size_t a = 0; a < positions.size(); ++a) {
    if ((positions[a] - goal_positions[a]).norm() > *goal_radius) return false;
  }
  return true;
}

}  // namespace coop_pic
