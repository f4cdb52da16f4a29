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

#include "coop_pic/sampler.h"

#include <fmt/format.h>

#include "coop_pic/error.h"
#include "coop_pic/parallel.h"
#include "coop_pic/rng.h"

namespace coop_pic {
namespace {

void CheckSchedule(int segments, double eps, int count) {
  if (segments < 1) throw DimensionError("rollouts need K >= 1 segments");
  if (!(eps > 0.0)) throw DimensionError("rollout step must be positive");
  if (count < 1) throw DimensionError("need at least one rollout");
}

}  // namespace

std::uint64_t AgentRolloutSeed(const SamplingKey& key, int agent,
                               int rollout) {
  return DeriveSeed(key.seed,
                    {static_cast<std::uint64_t>(StreamPurpose::kRollout),
                     key.trial, key.cycle, static_cast<std::uint64_t>(agent),
                     static_cast<std::uint64_t>(rollout)});
}

AgentPathSet SampleAgentPaths(const AgentModel& model, int agent,
                              const Eigen::VectorXd& x0, double t0,
                              int segments, double eps, int count,
                              const SamplingKey& key, int threads) {
  CheckSchedule(segments, eps, count);
  if (x0.size() != model.state_dim()) {
    throw DimensionError("initial agent state has the wrong length");
  }
  // non-owning alias; the joint view of one agent is the agent itself
  std::shared_ptr<const AgentModel> alias(std::shared_ptr<void>(), &model);
  JointDynamics single(alias, 1);

  AgentPathSet set;
  set.agent = agent;
  set.t0 = t0;
  set.eps = eps;
  set.segments = segments;
  set.paths.resize(count);
  const Eigen::VectorXd no_control;
  ParallelFor(count, threads, [&](int y) {
    RandomStream rng(AgentRolloutSeed(key, agent, y));
    Eigen::MatrixXd& path = set.paths[y];
    path.resize(model.state_dim(), segments + 1);
    path.col(0) = x0;
    for (int k = 0; k < segments; ++k) {
      single.Step(path.col(k), no_control, NoiseKind::kSampling,
                  t0 + k * eps, eps, rng, path.col(k + 1));
    }
  });
  return set;
}

RolloutBatch AssembleJointBatch(
    const Subsystem& subsystem,
    const std::vector<const AgentPathSet*>& member_paths,
    const SamplingKey& key) {
  if (static_cast<int>(member_paths.size()) != subsystem.size()) {
    throw DimensionError(fmt::format("{} path sets for a {}-member subsystem",
                                     member_paths.size(), subsystem.size()));
  }
  const AgentPathSet& first = *member_paths.front();
  const int count = first.size();
  const int segments = first.segments;
  if (count < 1) throw DimensionError("empty path set");
  const auto m = first.paths.front().rows();
  for (int pos = 0; pos < subsystem.size(); ++pos) {
    const AgentPathSet& set = *member_paths[pos];
    if (set.agent != subsystem.members[pos]) {
      throw DimensionError(fmt::format(
          "path set of agent {} given for member slot of agent {}",
          set.agent + 1, subsystem.members[pos] + 1));
    }
    if (set.size() != count || set.segments != segments ||
        set.eps != first.eps || set.t0 != first.t0) {
      throw DimensionError("member path sets differ in Y, K, eps or t0");
    }
  }

  RolloutBatch batch;
  batch.subsystem = subsystem;
  batch.key = key;
  batch.rollouts.resize(count);
  const auto n = subsystem.size();
  for (int y = 0; y < count; ++y) {
    Rollout& r = batch.rollouts[y];
    r.t0 = first.t0;
    r.eps = first.eps;
    r.states.resize(m * n, segments + 1);
    for (int pos = 0; pos < n; ++pos) {
      const Eigen::MatrixXd& path = member_paths[pos]->paths[y];
      if (path.rows() != m || path.cols() != segments + 1) {
        throw DimensionError("agent path has the wrong shape");
      }
      r.states.middleRows(pos * m, m) = path;
    }
  }
  return batch;
}

RolloutBatch SampleJointBatchCentralized(const JointDynamics& dyn,
                                         const Subsystem& subsystem,
                                         const Eigen::VectorXd& x0, double t0,
                                         int segments, double eps, int count,
                                         const SamplingKey& key, int threads) {
  CheckSchedule(segments, eps, count);
  if (dyn.members() != subsystem.size()) {
    throw DimensionError("dynamics and subsystem disagree on member count");
  }
  dyn.CheckState(x0);
  RolloutBatch batch;
  batch.subsystem = subsystem;
  batch.key = key;
  batch.rollouts.resize(count);
  const Eigen::VectorXd no_control;
  ParallelFor(count, threads, [&](int y) {
    RandomStream rng(DeriveSeed(
        key.seed, {static_cast<std::uint64_t>(StreamPurpose::kCentralized),
                   key.trial, key.cycle,
                   static_cast<std::uint64_t>(subsystem.center),
                   static_cast<std::uint64_t>(y)}));
    Rollout& r = batch.rollouts[y];
    r.t0 = t0;
    r.eps = eps;
    r.states.resize(dyn.state_dim(), segments + 1);
    r.states.col(0) = x0;
    for (int k = 0; k < segments; ++k) {
      dyn.Step(r.states.col(k), no_control, NoiseKind::kSampling, t0 + k * eps,
               eps, rng, r.states.col(k + 1));
    }
  });
  return batch;
}

}  // namespace coop_pic
