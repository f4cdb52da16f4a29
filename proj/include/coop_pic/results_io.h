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

#ifndef COOP_PIC_RESULTS_IO_H_
#define COOP_PIC_RESULTS_IO_H_

#include <string>
#include <vector>

#include "coop_pic/runner.h"
#include "coop_pic/scenario.h"

namespace coop_pic {

// doubles are written with 17 significant digits throughout
std::string FormatDouble(double v);

// trial,t,agent,<state names>,<input names>; one-based trial and agent
std::string TrajectoryCsv(const Scenario& scenario, const TrialResult& result);
std::string DiagnosticsCsv(const std::vector<TrialResult>& results);
// t, dist_i_j_mean, dist_i_j_std per report pair, goal_err_i_mean/std
std::string SummaryCsv(const Scenario& scenario, const TrialSummary& summary);
std::string TrialsCsv(const std::vector<TrialResult>& results);
// states of one scored batch: rollout,k,t,<member-prefixed state names>,weight
std::string RolloutCsv(const Scenario& scenario, const RolloutBatch& batch,
                       const PlanResult& plan);

struct WrittenFiles {
  std::vector<std::string> trajectories;
  std::string diagnostics;
  std::string summary;
  std::string trials;
  std::string scenario_echo;
};

// Writes every per-trial trajectory, the diagnostics, the summary, the seed
// record and the resolved scenario echo into `dir` (created if needed).
// Throws Error on I/O failure.
WrittenFiles WriteResults(const Scenario& scenario,
                          const std::vector<TrialResult>& results,
                          const std::string& dir);

void WriteTextFile(const std::string& path, const std::string& text);

// observer writing each scored batch under `dir`/rollouts
BatchObserver RolloutDumper(const Scenario& scenario, const std::string& dir);

}  // namespace coop_pic

#endif  // COOP_PIC_RESULTS_IO_H_
