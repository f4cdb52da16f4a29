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

#ifndef COOP_PIC_SAMPLER_H_
#define COOP_PIC_SAMPLER_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "coop_pic/dynamics.h"
#include "coop_pic/network.h"

namespace coop_pic {

// One uncontrolled joint trajectory: column k of `states` is x̄^(k),
// k = 0..K, with x̄^(0) the measured start state.
struct Rollout {
  Eigen::MatrixXd states;
  double t0 = 0.0;
  double eps = 0.0;

  int segments() const { return static_cast<int>(states.cols()) - 1; }
  auto x0() const { return states.col(0); }
};

// identifies the substream family used for one control cycle
struct SamplingKey {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::uint64_t cycle = 0;
};

// Y rollouts of one subsystem sharing x̄^(0), ε and K.
struct RolloutBatch {
  Subsystem subsystem;
  std::vector<Rollout> rollouts;
  SamplingKey key;

  int size() const { return static_cast<int>(rollouts.size()); }
};

// Y local paths of a single agent (columns = x^(0..K)).
struct AgentPathSet {
  int agent = 0;
  double t0 = 0.0;
  double eps = 0.0;
  int segments = 0;
  std::vector<Eigen::MatrixXd> paths;

  int size() const { return static_cast<int>(paths.size()); }
};

// seed of the stream that drives rollout `rollout` of agent `agent`
std::uint64_t AgentRolloutSeed(const SamplingKey& key, int agent, int rollout);

// Samples `count` zero-control Euler-Maruyama paths of one agent under the
// sampling noise. Each path owns a substream keyed by (key, agent, y), so
// the result is independent of `threads`.
AgentPathSet SampleAgentPaths(const AgentModel& model, int agent,
                              const Eigen::VectorXd& x0, double t0,
                              int segments, double eps, int count,
                              const SamplingKey& key, int threads = 1);

// Stacks path y of every member (in subsystem order) into joint rollout y.
// `member_paths[m]` must belong to subsystem.members[m].
RolloutBatch AssembleJointBatch(
    const Subsystem& subsystem,
    const std::vector<const AgentPathSet*>& member_paths,
    const SamplingKey& key = {});

// Centralized alternative: integrates the stacked joint dynamics directly
// with one substream per joint rollout. Distributionally identical to the
// assembled batch.
RolloutBatch SampleJointBatchCentralized(const JointDynamics& dyn,
                                         const Subsystem& subsystem,
                                         const Eigen::VectorXd& x0, double t0,
                                         int segments, double eps, int count,
                                         const SamplingKey& key,
                                         int threads = 1);

}  // namespace coop_pic

#endif  // COOP_PIC_SAMPLER_H_
