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

#ifndef COOP_PIC_VALIDATION_H_
#define COOP_PIC_VALIDATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coop_pic/costs.h"
#include "coop_pic/dynamics.h"
#include "coop_pic/pic.h"
#include "coop_pic/sampler.h"

namespace coop_pic {

struct DesirabilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int samples = 0;
};

// Z(x, t) = E[exp(-phi(y_tf)/lambda - int q/lambda)] over the uncontrolled
// diffusion under the sampling noise, integrated with Euler-Maruyama at
// `substep` (left-point rule for the running cost).
DesirabilityEstimate DesirabilityDirectMC(const JointDynamics& dyn,
                                          const StateCost& cost,
                                          const Eigen::VectorXd& x0, double t,
                                          double t_final, double lambda,
                                          int samples, double substep,
                                          std::uint64_t seed, int threads = 1);

// sample mean of exp(-phi/lambda - (eps/lambda) sum q) over a passive batch
DesirabilityEstimate DesirabilityDiscretized(const StateCost& cost,
                                             const RolloutBatch& batch,
                                             double lambda);

// Z estimate implied by a path weighting once the passive path density is
// divided back out: mean of exp(-score + (eps/2) sum |alpha|^2 + (1/2) sum
// log|H|). Arbitrates where lambda belongs on the alpha term.
DesirabilityEstimate ImpliedDesirability(const StateCost& cost,
                                         const JointDynamics& dyn,
                                         const RolloutBatch& batch,
                                         double lambda, PathWeighting weighting);

// dx = u dt + sigma dw, phi = a x^2 / 2, q = 0, R = lambda / sigma^2
struct Lq1dProblem {
  double a = 1.0;
  double sigma = 1.0;
  double lambda = 1.0;
  double t_final = 1.0;
};

// closed forms, tau = t_f - t:
//   Z = (1 + a sigma^2 tau / lambda)^(-1/2) exp(-a x^2 / (2 (lambda + a sigma^2 tau)))
//   u* = sigma^2 d/dx log Z = -sigma^2 a x / (lambda + a sigma^2 tau)
double Lq1dDesirability(const Lq1dProblem& p, double x, double t);
double Lq1dOptimalControl(const Lq1dProblem& p, double x, double t);

// brute force: Z as a Gaussian integral by composite Simpson quadrature,
// and u* from a central difference of log Z
double Lq1dDesirabilityQuadrature(const Lq1dProblem& p, double x, double t);
double Lq1dControlFiniteDifference(const Lq1dProblem& p, double x, double t);

// running cost 0, terminal a |x|^2 / 2 (the LQ test cost)
class QuadraticTerminalCost final : public StateCost {
 public:
  explicit QuadraticTerminalCost(double a) : a_(a) {}
  double Running(const Eigen::Ref<const Eigen::VectorXd>&,
                 double) const override {
    return 0.0;
  }
  double Terminal(const Eigen::Ref<const Eigen::VectorXd>& x) const override {
    return 0.5 * a_ * x.squaredNorm();
  }
  void RunningGradient(const Eigen::Ref<const Eigen::VectorXd>&, double,
                       Eigen::Ref<Eigen::VectorXd> grad) const override {
    grad.setZero();
  }
  bool has_analytic_gradient() const override { return true; }

 private:
  double a_;
};

// PIC control at (x, t) for the LQ problem using a batch of `rollouts`
// passive paths of `segments` steps of length eps = (t_f - t) / segments
struct Lq1dControlEstimate {
  double control = 0.0;
  double ess = 0.0;
};
Lq1dControlEstimate Lq1dPicControl(const Lq1dProblem& p, double x, double t,
                                   int segments, int rollouts,
                                   PathWeighting weighting, std::uint64_t seed,
                                   int threads = 1);

struct GradientCheckReport {
  int checked = 0;
  int excluded = 0;  // states near kinks (clamp, coincident agents, obstacles)
  double max_relative_error = 0.0;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty() && checked > 0; }
};

// Compares the analytic running-cost gradient with central differences at
// `count` random joint states drawn uniformly from the box [lo, hi] per
// state coordinate. States within `margin` of a non-differentiable set are
// resampled and counted as excluded.
GradientCheckReport GradientCheck(const SubsystemCost& cost,
                                  const Eigen::VectorXd& lo,
                                  const Eigen::VectorXd& hi, int count,
                                  std::uint64_t seed, double tolerance = 1e-5,
                                  double margin = 1e-3);

struct ValidationCheck {
  std::string suite;
  std::string name;
  bool passed = false;
  bool informational = false;  // reported, not counted
  std::string detail;
  std::vector<std::pair<std::string, double>> values;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::string chosen_weighting;
  std::string lambda_placement;

  bool AllPassed() const;
  const ValidationCheck* Find(const std::string& name) const;
};

void RunOracleSuite(ValidationReport& report, int threads = 1);
void RunInvariantSuite(ValidationReport& report, int threads = 1);
std::string ReportJson(const ValidationReport& report);

}  // namespace coop_pic

#endif  // COOP_PIC_VALIDATION_H_
