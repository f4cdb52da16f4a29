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

#ifndef COOP_PIC_RUNNER_H_
#define COOP_PIC_RUNNER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coop_pic/costs.h"
#include "coop_pic/dynamics.h"
#include "coop_pic/network.h"
#include "coop_pic/pic.h"
#include "coop_pic/sampler.h"
#include "coop_pic/scenario.h"

namespace coop_pic {

// rollout step and segment count for the current cycle
struct CycleSchedule {
  double eps = 0.0;
  int segments = 0;
};

// ε = (t_f - t)/K, clamped from below at the control period Δ, in which
// case K shrinks to max(1, floor((t_f - t)/Δ)). Throws when t >= t_f.
CycleSchedule ScheduleEps(double t, double t_final, int segments,
                          double period);

// number of control cycles from t0 to t_final at period Δ
int CycleCount(double t0, double t_final, double period);

struct CycleDiagnostics {
  int cycle = 0;
  double t = 0.0;
  int agent = 0;
  double eps = 0.0;
  int segments = 0;
  double s_min = 0.0;
  double s_mean = 0.0;
  double ess = 0.0;
  double u_norm = 0.0;  // |ū*| of the agent's joint estimate
  bool ess_low = false;
};

// per-scenario planning objects, built once and shared read-only
class Planner {
 public:
  explicit Planner(const Scenario& scenario);

  const Scenario& scenario() const { return *scenario_; }
  const Subsystem& subsystem(int agent) const { return subsystems_[agent]; }
  const SubsystemCost& cost(int agent) const { return costs_[agent]; }
  const JointDynamics& dynamics(int agent) const { return dynamics_[agent]; }

 private:
  const Scenario* scenario_;
  std::vector<Subsystem> subsystems_;
  std::vector<SubsystemCost> costs_;
  std::vector<JointDynamics> dynamics_;
};

// optional observer of every scored batch (rollout dumps)
using BatchObserver = std::function<void(int trial, int cycle, int agent,
                                         const RolloutBatch&,
                                         const PlanResult&)>;

struct CycleOutcome {
  std::vector<Eigen::VectorXd> controls;  // local u*_i per agent
  std::vector<Eigen::VectorXd> next_world;
  std::vector<CycleDiagnostics> diagnostics;
  double planning_seconds = 0.0;  // wall time of sampling + scoring
};

// One synchronous cycle of the cooperative controller: every agent plans
// from the same measured world snapshot, then all local controls are
// applied together for one period under the model noise.
CycleOutcome RunCycle(const Planner& planner,
                      const std::vector<Eigen::VectorXd>& world, double t,
                      const SamplingKey& key,
                      const BatchObserver& observer = {});

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string failure;

  std::vector<double> times;
  // [agent][step]; controls[a][s] is applied on [times[s], times[s+1]),
  // zero on the final row
  std::vector<std::vector<Eigen::VectorXd>> states;
  std::vector<std::vector<Eigen::VectorXd>> controls;
  std::vector<CycleDiagnostics> diagnostics;

  int cycles = 0;
  int ess_low_cycles = 0;
  double planning_seconds = 0.0;
};

struct RunOptions {
  int threads = 1;  // trials run concurrently
  BatchObserver observer;
};

std::uint64_t TrialSeed(std::uint64_t base_seed, int trial);

TrialResult RunTrial(const Scenario& scenario, int trial,
                     std::uint64_t base_seed, const RunOptions& options = {});

std::vector<TrialResult> RunTrials(const Scenario& scenario, int n,
                                   std::uint64_t base_seed,
                                   const RunOptions& options = {});

// per-time statistics over successful trials
struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<int> count;
};

struct TrialSummary {
  std::vector<double> times;
  std::vector<AgentPair> pairs;
  std::vector<SeriesStats> pair_distance;  // one per pair
  std::vector<SeriesStats> goal_distance;  // one per agent
  int successful = 0;
  int failed = 0;
};

TrialSummary Summarize(const Scenario& scenario,
                       const std::vector<TrialResult>& results);

// position distance between two agents at step s of a trial
double AgentDistance(const Scenario& scenario, const TrialResult& r, int a,
                     int b, int step);

}  // namespace coop_pic

#endif  // COOP_PIC_RUNNER_H_
