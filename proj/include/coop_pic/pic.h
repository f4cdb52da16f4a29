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

#ifndef COOP_PIC_PIC_H_
#define COOP_PIC_PIC_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coop_pic/costs.h"
#include "coop_pic/dynamics.h"
#include "coop_pic/sampler.h"

namespace coop_pic {

// H = B̄_(d) σ̄_s σ̄_sᵀ B̄_(d)ᵀ with its inverse and log-determinant
struct StepWeight {
  Eigen::MatrixXd h;
  Eigen::MatrixXd h_inv;
  double log_det = 0.0;
};

// Throws ScoringError when H is not positive definite.
StepWeight StepWeightMatrix(const JointDynamics& dyn,
                            const Eigen::Ref<const Eigen::VectorXd>& x);

// Which exponent feeds the softmax over sampled rollouts.
//
// kGeneralizedPathValue uses S̃ exactly as written for the path integral,
// with the ‖α‖² term scaled by ε/(2λ). kUnscaledQuadratic is the variant
// that scales ‖α‖² by ε/2. Both integrate against the Lebesgue path measure;
// applied to rollouts that were *drawn* from the passive dynamics they count
// the passive density twice. kPassiveCorrected divides that density back
// out, leaving φ/λ + (ε/λ) Σ q, which is the consistent self-normalized
// estimator for passive samples and the default.
enum class PathWeighting {
  kGeneralizedPathValue,
  kUnscaledQuadratic,
  kPassiveCorrected,
};

std::string ToString(PathWeighting w);
PathWeighting ParsePathWeighting(const std::string& name);

// Additive pieces of the generalized path value of one rollout.
struct PathValue {
  double terminal = 0.0;   // φ(x̄^(K)) / λ
  double running = 0.0;    // (ε/λ) Σ_k q(x̄^(k), t_k)
  double quadratic = 0.0;  // (ε/2) Σ_k ‖α^(k)‖² in the H^-1 metric, no λ
  double log_det = 0.0;    // ½ Σ_k log|H^(k)|
  double lambda = 1.0;

  // S̃ = φ/λ + (ε/λ)Σq + (ε/2λ)Σ‖α‖² + ½Σ log|H|
  double generalized() const {
    return terminal + running + quadratic / lambda + log_det;
  }
  double Score(PathWeighting weighting) const;
};

struct PathScore {
  double s_tilde = 0.0;
  Eigen::VectorXd u_tilde;
};

PathValue EvaluatePathValue(const StateCost& cost, const JointDynamics& dyn,
                            const Rollout& rollout, double lambda);

// generalized S̃; convenience over EvaluatePathValue
double GeneralizedPathValue(const StateCost& cost, const JointDynamics& dyn,
                            const Rollout& rollout, double lambda);

// ũ = -(ε/λ) ∇_{x̄_(d)} q(x̄^(0), t_0) + (H^(0))^-1 α^(0), length D n
Eigen::VectorXd InitialControl(const StateCost& cost, const JointDynamics& dyn,
                               const Rollout& rollout, double lambda);

struct PathDistribution {
  std::vector<double> probs;
  double ess = 0.0;  // 1 / Σ p²
};

// p_y = exp(-S_y) / Σ_z exp(-S_z), evaluated after subtracting min S.
// Throws ScoringError on empty or non-finite input.
PathDistribution PathDistributionFromScores(std::span<const double> scores);

struct ControlEstimate {
  Eigen::VectorXd joint;  // ū*, length P n
  Eigen::VectorXd local;  // center block, length P
  std::vector<double> weights;
  double ess = 0.0;
};

// ū* = σ̄_s σ̄_sᵀ B̄_(d)(x̄^(0))ᵀ Σ_y p_y ũ_y; the sum is an ordered fold.
ControlEstimate EstimateControl(const JointDynamics& dyn,
                                const Eigen::Ref<const Eigen::VectorXd>& x0,
                                const std::vector<Eigen::VectorXd>& u_tildes,
                                const PathDistribution& distribution);

struct PlanOptions {
  PathWeighting weighting = PathWeighting::kPassiveCorrected;
  // ESS below this fraction of Y is flagged as weight degeneracy
  double ess_warning_fraction = 0.05;
};

// one subsystem's control computation for one cycle
struct PlanResult {
  ControlEstimate estimate;
  std::vector<PathScore> scores;  // s_tilde holds the weighting exponent
  double s_min = 0.0;
  double s_mean = 0.0;
  bool ess_low = false;
};

PlanResult PlanSubsystem(const StateCost& cost, const JointDynamics& dyn,
                         const RolloutBatch& batch, double lambda,
                         const PlanOptions& options = {});

}  // namespace coop_pic

#endif  // COOP_PIC_PIC_H_
