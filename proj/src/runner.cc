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

#include "coop_pic/runner.h"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "coop_pic/error.h"
#include "coop_pic/parallel.h"
#include "coop_pic/rng.h"

namespace coop_pic {
namespace {

// slack for floating cycle arithmetic (t = t0 + c Δ)
constexpr double kTimeSlack = 1e-9;

}  // namespace

CycleSchedule ScheduleEps(double t, double t_final, int segments,
                          double period) {
  if (!(t < t_final)) {
    throw Error(fmt::format("schedule requested at t={} >= t_f={}", t, t_final));
  }
  if (segments < 1) throw Error("horizon needs K >= 1");
  if (!(period > 0.0)) throw Error("control period must be positive");
  const double remaining = t_final - t;
  CycleSchedule s{remaining / segments, segments};
  if (s.eps < period - kTimeSlack) {
    s.eps = period;
    s.segments = std::max(
        1, static_cast<int>(std::floor(remaining / period + kTimeSlack)));
  }
  return s;
}

int CycleCount(double t0, double t_final, double period) {
  return std::max(
      1, static_cast<int>(std::ceil((t_final - t0) / period - kTimeSlack)));
}

// ----- planner ----- //

Planner::Planner(const Scenario& scenario) : scenario_(&scenario) {
  const int n = scenario.size();
  subsystems_.reserve(n);
  costs_.reserve(n);
  dynamics_.reserve(n);
  for (int i = 0; i < n; ++i) {
    subsystems_.push_back(MakeSubsystem(scenario.graph, i));
    costs_.emplace_back(scenario.costs, subsystems_.back(),
                        scenario.model->state_dim(),
                        scenario.model->position_dim());
    dynamics_.emplace_back(scenario.model, subsystems_.back().size());
  }
}

// ----- one cycle ----- //

CycleOutcome RunCycle(const Planner& planner,
                      const std::vector<Eigen::VectorXd>& world, double t,
                      const SamplingKey& key, const BatchObserver& observer) {
  const Scenario& sc = planner.scenario();
  const int n = sc.size();
  const AgentModel& model = *sc.model;
  if (static_cast<int>(world.size()) != n) {
    throw DimensionError("world snapshot has the wrong number of agents");
  }
  const CycleSchedule sched =
      ScheduleEps(t, sc.t_final, sc.segments, sc.period);
  auto start = std::chrono::steady_clock::now();

  // each agent samples its local paths once; subsystems share them
  std::vector<AgentPathSet> local;
  if (sc.sampling == SamplingMode::kDistributed) {
    local.reserve(n);
    for (int a = 0; a < n; ++a) {
      local.push_back(SampleAgentPaths(model, a, world[a], t, sched.segments,
                                       sched.eps, sc.rollouts, key));
    }
  }

  CycleOutcome out;
  out.controls.resize(n);
  out.diagnostics.resize(n);
  for (int i = 0; i < n; ++i) {
    const Subsystem& sub = planner.subsystem(i);
    RolloutBatch batch;
    if (sc.sampling == SamplingMode::kDistributed) {
      std::vector<const AgentPathSet*> members;
      members.reserve(sub.size());
      for (int a : sub.members) members.push_back(&local[a]);
      batch = AssembleJointBatch(sub, members, key);
    } else {
      Eigen::VectorXd x0(model.state_dim() * sub.size());
      for (int pos = 0; pos < sub.size(); ++pos) {
        x0.segment(pos * model.state_dim(), model.state_dim()) =
            world[sub.members[pos]];
      }
      batch = SampleJointBatchCentralized(planner.dynamics(i), sub, x0, t,
                                          sched.segments, sched.eps,
                                          sc.rollouts, key);
    }
    PlanResult plan = PlanSubsystem(planner.cost(i), planner.dynamics(i), batch,
                                    sc.costs.lambda, sc.planner);
    if (observer) observer(static_cast<int>(key.trial),
                           static_cast<int>(key.cycle), i, batch, plan);
    out.controls[i] = plan.estimate.local;
    CycleDiagnostics& d = out.diagnostics[i];
    d.cycle = static_cast<int>(key.cycle);
    d.t = t;
    d.agent = i;
    d.eps = sched.eps;
    d.segments = sched.segments;
    d.s_min = plan.s_min;
    d.s_mean = plan.s_mean;
    d.ess = plan.estimate.ess;
    d.u_norm = plan.estimate.joint.norm();
    d.ess_low = plan.ess_low;
  }
  out.planning_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  // synchronous world advance under the model noise
  std::shared_ptr<const AgentModel> alias(std::shared_ptr<void>(), &model);
  JointDynamics single(alias, 1);
  out.next_world.resize(n);
  for (int a = 0; a < n; ++a) {
    RandomStream rng(DeriveSeed(
        key.seed, {static_cast<std::uint64_t>(StreamPurpose::kWorld),
                   key.trial, key.cycle, static_cast<std::uint64_t>(a)}));
    out.next_world[a].resize(model.state_dim());
    single.Step(world[a], out.controls[a], NoiseKind::kModel, t, sc.period, rng,
                out.next_world[a]);
  }
  return out;
}

// ----- trials ----- //

std::uint64_t TrialSeed(std::uint64_t base_seed, int trial) {
  return DeriveSeed(base_seed,
                    {static_cast<std::uint64_t>(StreamPurpose::kTrial),
                     static_cast<std::uint64_t>(trial)});
}

TrialResult RunTrial(const Scenario& scenario, int trial,
                     std::uint64_t base_seed, const RunOptions& options) {
  TrialResult r;
  r.trial = trial;
  r.seed = TrialSeed(base_seed, trial);
  const int n = scenario.size();
  const int p = scenario.model->input_dim();
  r.states.resize(n);
  r.controls.resize(n);

  std::vector<Eigen::VectorXd> world = scenario.initial_states;
  std::vector<Eigen::VectorXd> goal_positions(n);
  for (int a = 0; a < n; ++a) goal_positions[a] = scenario.GoalPosition(a);
  auto positions = [&] {
    std::vector<Eigen::VectorXd> pos(n);
    for (int a = 0; a < n; ++a) {
      pos[a] = world[a].head(scenario.model->position_dim());
    }
    return pos;
  };
  auto record = [&](double t) {
    r.times.push_back(t);
    for (int a = 0; a < n; ++a) {
      r.states[a].push_back(world[a]);
      r.controls[a].push_back(Eigen::VectorXd::Zero(p));
    }
  };

  try {
    Planner planner(scenario);
    const int max_cycles =
        CycleCount(scenario.t0, scenario.t_final, scenario.period);
    record(scenario.t0);
    for (int c = 0; c < max_cycles; ++c) {
      const double t = scenario.t0 + c * scenario.period;
      if (scenario.exit.Exited(t, positions(), goal_positions)) break;
      SamplingKey key{r.seed, static_cast<std::uint64_t>(trial),
                      static_cast<std::uint64_t>(c)};
      CycleOutcome step = RunCycle(planner, world, t, key, options.observer);
      for (int a = 0; a < n; ++a) r.controls[a].back() = step.controls[a];
      for (const auto& d : step.diagnostics) {
        r.diagnostics.push_back(d);
        if (d.ess_low) ++r.ess_low_cycles;
      }
      r.planning_seconds += step.planning_seconds;
      ++r.cycles;
      world = std::move(step.next_world);
      record(std::min(scenario.t0 + (c + 1) * scenario.period,
                      std::max(scenario.t_final, t)));
    }
  } catch (const Error& e) {
    r.ok = false;
    r.failure = e.what();
    spdlog::error("trial {} failed: {}", trial, e.what());
  }
  if (r.ess_low_cycles > 0) {
    spdlog::debug("trial {}: {} of {} agent-cycles had ESS below {:.0f}% of Y",
                  trial, r.ess_low_cycles, r.cycles * n,
                  100.0 * scenario.planner.ess_warning_fraction);
  }
  return r;
}

std::vector<TrialResult> RunTrials(const Scenario& scenario, int n,
                                   std::uint64_t base_seed,
                                   const RunOptions& options) {
  std::vector<TrialResult> results(n);
  ParallelFor(n, options.threads, [&](int k) {
    results[k] = RunTrial(scenario, k, base_seed, options);
  });
  return results;
}

// ----- aggregation ----- //

double AgentDistance(const Scenario& scenario, const TrialResult& r, int a,
                     int b, int step) {
  const int pd = scenario.model->position_dim();
  return (r.states[a][step].head(pd) - r.states[b][step].head(pd)).norm();
}

namespace {

SeriesStats Accumulate(const std::vector<std::vector<double>>& per_trial,
                       std::size_t steps) {
  SeriesStats s;
  s.mean.assign(steps, 0.0);
  s.stddev.assign(steps, 0.0);
  s.count.assign(steps, 0);
  for (std::size_t k = 0; k < steps; ++k) {
    double sum = 0.0;
    int cnt = 0;
    for (const auto& series : per_trial) {
      if (k < series.size()) {
        sum += series[k];
        ++cnt;
      }
    }
    if (cnt == 0) continue;
    const double mean = sum / cnt;
    double ss = 0.0;
    for (const auto& series : per_trial) {
      if (k < series.size()) ss += (series[k] - mean) * (series[k] - mean);
    }
    s.mean[k] = mean;
    s.stddev[k] = cnt > 1 ? std::sqrt(ss / (cnt - 1)) : 0.0;
    s.count[k] = cnt;
  }
  return s;
}

}  // namespace

TrialSummary Summarize(const Scenario& scenario,
                       const std::vector<TrialResult>& results) {
  TrialSummary summary;
  summary.pairs = scenario.report_pairs;
  std::size_t steps = 0;
  for (const auto& r : results) {
    if (!r.ok) {
      ++summary.failed;
      continue;
    }
    ++summary.successful;
    if (r.times.size() > steps) {
      steps = r.times.size();
      summary.times = r.times;
    }
  }
  const int pd = scenario.model->position_dim();
  for (const auto& [a, b] : summary.pairs) {
    std::vector<std::vector<double>> series;
    for (const auto& r : results) {
      if (!r.ok) continue;
      auto& s = series.emplace_back();
      for (std::size_t k = 0; k < r.times.size(); ++k) {
        s.push_back(AgentDistance(scenario, r, a, b, static_cast<int>(k)));
      }
    }
    summary.pair_distance.push_back(Accumulate(series, steps));
  }
  for (int a = 0; a < scenario.size(); ++a) {
    Eigen::VectorXd goal = scenario.GoalPosition(a);
    std::vector<std::vector<double>> series;
    for (const auto& r : results) {
      if (!r.ok) continue;
      auto& s = series.emplace_back();
      for (const auto& x : r.states[a]) s.push_back((x.head(pd) - goal).norm());
    }
    summary.goal_distance.push_back(Accumulate(series, steps));
  }
  return summary;
}

}  // namespace coop_pic
