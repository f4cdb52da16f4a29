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

// Command-line driver: run scenarios, sweep parameters, run the validation
// suites.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include "coop_pic/error.h"
#include "coop_pic/results_io.h"
#include "coop_pic/runner.h"
#include "coop_pic/scenario.h"
#include "coop_pic/validation.h"

namespace {

using coop_pic::Scenario;
using coop_pic::TrialResult;

// resolved exit codes
constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

struct RunArgs {
  std::string scenario;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
  bool quiet = false;
  bool no_write = false;
};

std::string OutputDir(const Scenario& sc, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("COOP_PIC_OUTPUT_DIR"); env && *env) {
    return (std::filesystem::path(env) / sc.name).string();
  }
  return sc.output_dir;
}

std::string FindScenario(const std::string& name) {
  return coop_pic::ResolveScenarioPath(
      name, {".", "scenarios", coop_pic::BundledScenarioDir()});
}

// time-average of a summary series, with the standard error of the
// per-trial time averages
struct Averaged {
  double mean = 0.0;
  double se = 0.0;
};

Averaged TimeAveragedDistance(const Scenario& sc,
                              const std::vector<TrialResult>& results, int a,
                              int b) {
  std::vector<double> per_trial;
  for (const auto& r : results) {
    if (!r.ok || r.times.empty()) continue;
    double sum = 0.0;
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      sum += coop_pic::AgentDistance(sc, r, a, b, static_cast<int>(k));
    }
    per_trial.push_back(sum / static_cast<double>(r.times.size()));
  }
  Averaged out;
  if (per_trial.empty()) return out;
  for (double v : per_trial) out.mean += v;
  out.mean /= static_cast<double>(per_trial.size());
  if (per_trial.size() > 1) {
    double ss = 0.0;
    for (double v : per_trial) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(per_trial.size() - 1) /
                       static_cast<double>(per_trial.size()));
  }
  return out;
}

void PrintSummary(const Scenario& sc, const std::vector<TrialResult>& results,
                  double wall) {
  coop_pic::TrialSummary s = coop_pic::Summarize(sc, results);
  int cycles = 0;
  double planning = 0.0;
  for (const auto& r : results) {
    cycles += r.cycles;
    planning += r.planning_seconds;
  }
  fmt::print("{}: {} trials ({} ok, {} failed), {:.1f} s wall\n", sc.name,
             results.size(), s.successful, s.failed, wall);
  if (cycles > 0) {
    fmt::print("  planning per agent-cycle: {:.3g} ms\n",
               1e3 * planning / (cycles * sc.size()));
  }
  for (const auto& [a, b] : s.pairs) {
    Averaged d = TimeAveragedDistance(sc, results, a, b);
    fmt::print("  mean dist({},{}) over time: {:.3f} +- {:.3f}\n", a + 1, b + 1,
               d.mean, d.se);
  }
  if (s.times.empty()) return;
  const std::size_t last = s.times.size() - 1;
  for (int a = 0; a < sc.size(); ++a) {
    const double initial = (sc.InitialPosition(a) - sc.GoalPosition(a)).norm();
    fmt::print("  agent {} final goal error: {:.3f} (initial {:.3f})\n", a + 1,
               s.goal_distance[a].mean[last], initial);
  }
}

int RunScenario(const Scenario& sc, const RunArgs& args) {
  const int trials = args.trials.value_or(sc.trials);
  const std::uint64_t seed = args.seed.value_or(sc.seed);
  const std::string out = OutputDir(sc, args.out);
  coop_pic::RunOptions options;
  options.threads = args.threads;
  if (sc.dump_rollouts && !args.no_write) {
    options.observer = coop_pic::RolloutDumper(sc, out);
  }
  auto start = std::chrono::steady_clock::now();
  std::vector<TrialResult> results =
      coop_pic::RunTrials(sc, trials, seed, options);
  double wall = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  if (!args.no_write) {
    Scenario echoed = sc;
    echoed.trials = trials;
    echoed.seed = seed;
    coop_pic::WriteResults(echoed, results, out);
  }
  if (!args.quiet) {
    PrintSummary(sc, results, wall);
    if (!args.no_write) fmt::print("  results in {}\n", out);
  }
  for (const auto& r : results) {
    if (!r.ok) return kFailed;
  }
  return kOk;
}

// walks a dotted path with optional [k] indices and assigns `value`
void AssignPath(YAML::Node root, const std::string& path,
                const std::string& value) {
  std::vector<std::string> keys;
  std::vector<std::optional<int>> indices;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    std::size_t dot = path.find('.', pos);
    std::string part = path.substr(pos, dot == std::string::npos
                                            ? std::string::npos
                                            : dot - pos);
    std::optional<int> index;
    if (auto br = part.find('['); br != std::string::npos) {
      index = std::stoi(part.substr(br + 1));
      part = part.substr(0, br);
    }
    keys.push_back(part);
    indices.push_back(index);
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  YAML::Node node = root;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const bool last = k + 1 == keys.size();
    if (!keys[k].empty()) {
      if (last && !indices[k]) {
        node[keys[k]] = YAML::Load(value);
        return;
      }
      node.reset(node[keys[k]]);
    }
    if (indices[k]) {
      if (!node.IsSequence() || *indices[k] < 0 ||
          *indices[k] >= static_cast<int>(node.size())) {
        throw coop_pic::ValidationError(path, "index out of range");
      }
      if (last) {
        node[*indices[k]] = YAML::Load(value);
        return;
      }
      node.reset(node[*indices[k]]);
    }
  }
}

std::vector<std::string> SplitValues(const std::string& s) {
  // commas inside brackets belong to the value
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : s) {
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

int Sweep(const RunArgs& args, const std::string& param) {
  auto eq = param.find('=');
  if (eq == std::string::npos) {
    throw coop_pic::ValidationError("--param", "expected <path>=<v1>,<v2>,...");
  }
  const std::string path = param.substr(0, eq);
  const std::string file = FindScenario(args.scenario);
  int status = kOk;
  for (const std::string& value : SplitValues(param.substr(eq + 1))) {
    YAML::Node root = YAML::LoadFile(file);
    AssignPath(root, path, value);
    Scenario sc = coop_pic::ScenarioFromYaml(root, file);
    sc.name = fmt::format("{}__{}={}", sc.name, path, value);
    for (char& ch : sc.name) {
      if (ch == '[' || ch == ']' || ch == ' ' || ch == '/') ch = '_';
    }
    RunArgs a = args;
    if (!args.out.empty()) {
      a.out = (std::filesystem::path(args.out) / sc.name).string();
    } else {
      sc.output_dir = (std::filesystem::path(sc.output_dir).parent_path() /
                       sc.name).string();
    }
    status = std::max(status, RunScenario(sc, a));
  }
  return status;
}

int Validate(const std::string& suite, const std::string& report_path,
             int threads) {
  coop_pic::ValidationReport report;
  if (suite == "oracle" || suite == "all") {
    coop_pic::RunOracleSuite(report, threads);
  }
  if (suite == "invariants" || suite == "all") {
    coop_pic::RunInvariantSuite(report, threads);
  }
  if (suite != "oracle" && suite != "invariants" && suite != "all") {
    throw coop_pic::ValidationError("--suite", "expected oracle|invariants|all");
  }
  for (const auto& c : report.checks) {
    fmt::print("{} {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
  }
  if (!report_path.empty()) {
    coop_pic::WriteTextFile(report_path, coop_pic::ReportJson(report));
    fmt::print("report written to {}\n", report_path);
  }
  return report.AllPassed() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative path-integral control simulator"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run a scenario");
  run->add_option("scenario", run_args.scenario, "name or path")->required();
  run->add_option("--trials", run_args.trials, "override the trial count");
  run->add_option("--seed", run_args.seed, "override the base seed");
  run->add_option("--out", run_args.out, "output directory");
  run->add_option("--threads", run_args.threads,
                  "concurrent trials (0 = hardware)");
  run->add_flag("--quiet", run_args.quiet, "no summary on stdout");
  run->add_flag("--no-write", run_args.no_write, "skip result files");

  RunArgs sweep_args;
  std::string param;
  CLI::App* sweep = app.add_subcommand("sweep", "rerun with one parameter varied");
  sweep->add_option("scenario", sweep_args.scenario, "name or path")->required();
  sweep->add_option("--param", param, "<path>=<v1>,<v2>,... e.g. costs.lambda=0.5,1")
      ->required();
  sweep->add_option("--trials", sweep_args.trials, "override the trial count");
  sweep->add_option("--seed", sweep_args.seed, "override the base seed");
  sweep->add_option("--out", sweep_args.out, "parent output directory");
  sweep->add_option("--threads", sweep_args.threads, "concurrent trials");
  sweep->add_flag("--no-write", sweep_args.no_write, "skip result files");

  std::string suite = "all";
  std::string report;
  int validate_threads = 1;
  CLI::App* validate = app.add_subcommand("validate", "run validation suites");
  validate->add_option("--suite", suite, "oracle|invariants|all");
  validate->add_option("--report", report, "write a JSON report here");
  validate->add_option("--threads", validate_threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) {
      Scenario sc = coop_pic::LoadScenario(FindScenario(run_args.scenario));
      return RunScenario(sc, run_args);
    }
    if (*sweep) return Sweep(sweep_args, param);
    if (*validate) return Validate(suite, report, validate_threads);
  } catch (const coop_pic::ValidationError& e) {
    spdlog::error("{}", e.what());
    return kBadInput;
  } catch (const coop_pic::ParseError& e) {
    spdlog::error("{}", e.what());
    return kBadInput;
  } catch (const YAML::Exception& e) {
    spdlog::error("{}", e.what());
    return kBadInput;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailed;
  }
  return kOk;
}
