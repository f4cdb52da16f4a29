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

#include "coop_pic/results_io.h"

#include <filesystem>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "coop_pic/error.h"

namespace coop_pic {

std::string FormatDouble(double v) { return fmt::format("{:.17g}", v); }

std::string TrajectoryCsv(const Scenario& scenario, const TrialResult& r) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "trial,t,agent");
  for (const auto& s : scenario.model->state_names()) fmt::format_to(out, ",{}", s);
  for (const auto& s : scenario.model->input_names()) fmt::format_to(out, ",{}", s);
  fmt::format_to(out, "\n");
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    for (int a = 0; a < static_cast<int>(r.states.size()); ++a) {
      fmt::format_to(out, "{},{:.17g},{}", r.trial + 1, r.times[k], a + 1);
      for (double v : r.states[a][k]) fmt::format_to(out, ",{:.17g}", v);
      for (double v : r.controls[a][k]) fmt::format_to(out, ",{:.17g}", v);
      fmt::format_to(out, "\n");
    }
  }
  return fmt::to_string(buf);
}

std::string DiagnosticsCsv(const std::vector<TrialResult>& results) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out,
                 "trial,cycle,t,agent,eps,segments,s_min,s_mean,ess,u_norm,"
                 "ess_low\n");
  for (const auto& r : results) {
    for (const auto& d : r.diagnostics) {
      fmt::format_to(out, "{},{},{:.17g},{},{:.17g},{},{:.17g},{:.17g},{:.17g},"
                          "{:.17g},{}\n",
                     r.trial + 1, d.cycle, d.t, d.agent + 1, d.eps, d.segments,
                     d.s_min, d.s_mean, d.ess, d.u_norm, d.ess_low ? 1 : 0);
    }
  }
  return fmt::to_string(buf);
}

std::string SummaryCsv(const Scenario& scenario, const TrialSummary& s) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "t");
  for (const auto& [a, b] : s.pairs) {
    fmt::format_to(out, ",dist_{0}_{1}_mean,dist_{0}_{1}_std", a + 1, b + 1);
  }
  for (int a = 0; a < scenario.size(); ++a) {
    fmt::format_to(out, ",goal_err_{0}_mean,goal_err_{0}_std", a + 1);
  }
  fmt::format_to(out, ",trials\n");
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    fmt::format_to(out, "{:.17g}", s.times[k]);
    int count = 0;
    for (const auto& st : s.pair_distance) {
      fmt::format_to(out, ",{:.17g},{:.17g}", st.mean[k], st.stddev[k]);
    }
    for (const auto& st : s.goal_distance) {
      fmt::format_to(out, ",{:.17g},{:.17g}", st.mean[k], st.stddev[k]);
      count = st.count[k];
    }
    fmt::format_to(out, ",{}\n", count);
  }
  return fmt::to_string(buf);
}

std::string TrialsCsv(const std::vector<TrialResult>& results) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "trial,seed,ok,cycles,ess_low_cycles,failure\n");
  for (const auto& r : results) {
    std::string failure = r.failure;
    for (char& ch : failure) {
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    }
    fmt::format_to(out, "{},{},{},{},{},{}\n", r.trial + 1, r.seed,
                   r.ok ? 1 : 0, r.cycles, r.ess_low_cycles, failure);
  }
  return fmt::to_string(buf);
}

std::string RolloutCsv(const Scenario& scenario, const RolloutBatch& batch,
                       const PlanResult& plan) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  const auto names = scenario.model->state_names();
  fmt::format_to(out, "rollout,k,t");
  for (int a : batch.subsystem.members) {
    for (const auto& s : names) fmt::format_to(out, ",{}_{}", s, a + 1);
  }
  fmt::format_to(out, ",score,weight\n");
  for (int y = 0; y < batch.size(); ++y) {
    const Rollout& r = batch.rollouts[y];
    for (int k = 0; k <= r.segments(); ++k) {
      fmt::format_to(out, "{},{},{:.17g}", y + 1, k, r.t0 + k * r.eps);
      for (int c = 0; c < r.states.rows(); ++c) {
        fmt::format_to(out, ",{:.17g}", r.states(c, k));
      }
      fmt::format_to(out, ",{:.17g},{:.17g}\n", plan.scores[y].s_tilde,
                     plan.estimate.weights[y]);
    }
  }
  return fmt::to_string(buf);
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path));
  f << text;
  if (!f) throw Error(fmt::format("write to '{}' failed", path));
}

namespace {

void EnsureDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(fmt::format("cannot create '{}': {}", dir.string(),
                            ec.message()));
  }
}

}  // namespace

WrittenFiles WriteResults(const Scenario& scenario,
                          const std::vector<TrialResult>& results,
                          const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  EnsureDir(root);
  WrittenFiles files;
  for (const auto& r : results) {
    fs::path p = root / fmt::format("trajectory_trial_{:03d}.csv", r.trial + 1);
    WriteTextFile(p.string(), TrajectoryCsv(scenario, r));
    files.trajectories.push_back(p.string());
  }
  files.diagnostics = (root / "diagnostics.csv").string();
  WriteTextFile(files.diagnostics, DiagnosticsCsv(results));
  files.summary = (root / "summary.csv").string();
  WriteTextFile(files.summary, SummaryCsv(scenario, Summarize(scenario, results)));
  files.trials = (root / "trials.csv").string();
  WriteTextFile(files.trials, TrialsCsv(results));
  files.scenario_echo = (root / "scenario.yaml").string();
  WriteTextFile(files.scenario_echo, ScenarioToYaml(scenario));
  return files;
}

BatchObserver RolloutDumper(const Scenario& scenario, const std::string& dir) {
  const std::filesystem::path root = std::filesystem::path(dir) / "rollouts";
  EnsureDir(root);
  return [&scenario, root](int trial, int cycle, int agent,
                           const RolloutBatch& batch, const PlanResult& plan) {
    auto p = root / fmt::format("trial_{:03d}_cycle_{:04d}_agent_{}.csv",
                                trial + 1, cycle, agent + 1);
    WriteTextFile(p.string(), RolloutCsv(scenario, batch, plan));
  };
}

}  // namespace coop_pic
