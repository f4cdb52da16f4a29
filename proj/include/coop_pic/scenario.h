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

#ifndef COOP_PIC_SCENARIO_H_
#define COOP_PIC_SCENARIO_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coop_pic/costs.h"
#include "coop_pic/dynamics.h"
#include "coop_pic/network.h"
#include "coop_pic/pic.h"

namespace YAML {
class Node;
}

namespace coop_pic {

// how d_i^max / d_ij^max are resolved
//   zero     all regularizers 0 (running cost is a plain weighted distance)
//   initial  distances at scenario start
//   explicit values listed in the file
enum class RegularizerMode { kZero, kInitial, kExplicit };

// derived: R̄ = λ(σ_s σ_sᵀ)^-1; explicit: supplied R checked against it,
// warning (lenient) or error (strict) above the tolerance
enum class ControlWeightMode { kDerived, kExplicitLenient, kExplicitStrict };

enum class SamplingMode { kDistributed, kCentralized };

struct ModelParams {
  std::string kind = "unicycle";
  std::vector<double> noise;           // unicycle: (sigma, nu)
  std::vector<double> sampling_noise;  // unicycle: (sigma_s, nu_s)
};

struct Scenario {
  std::string name;
  std::string source_path;

  CommGraph graph{1, {}};
  ModelParams model_params;
  std::shared_ptr<const AgentModel> model;
  std::vector<Eigen::VectorXd> initial_states;

  CostSpec costs;
  RegularizerMode regularizer_mode = RegularizerMode::kInitial;
  ControlWeightMode control_weight_mode = ControlWeightMode::kDerived;
  Eigen::MatrixXd control_weight;  // per-agent P x P actually used/checked
  double control_weight_mismatch = 0.0;

  double t0 = 0.0;
  double t_final = 0.0;
  double period = 0.2;
  int segments = 8;
  int rollouts = 400;
  ExitSpec exit;

  int trials = 1;
  std::uint64_t seed = 1;
  SamplingMode sampling = SamplingMode::kDistributed;
  PlanOptions planner;

  // pairs whose distances are aggregated into the summary (default: edges)
  std::vector<AgentPair> report_pairs;
  std::string output_dir;
  bool dump_rollouts = false;

  int size() const { return graph.size(); }
  Eigen::VectorXd GoalPosition(int agent) const {
    return costs.goals[agent].head(model->position_dim());
  }
  Eigen::VectorXd InitialPosition(int agent) const {
    return initial_states[agent].head(model->position_dim());
  }
};

// Parses and validates a scenario file. Relative output directories are
// kept as written. Throws ParseError / ValidationError (with field path).
Scenario LoadScenario(const std::string& path);
Scenario ScenarioFromYaml(const YAML::Node& root, const std::string& source);
Scenario ScenarioFromString(const std::string& text,
                            const std::string& source = "<string>");

// Fully-resolved scenario as YAML (regularizers explicit, seed included),
// doubles written with 17 significant digits. Loading the echo reproduces
// identical runs.
std::string ScenarioToYaml(const Scenario& scenario);

// Resolves a scenario name or path: an existing file wins, otherwise
// `<dir>/<name>.yaml` for each search directory.
std::string ResolveScenarioPath(const std::string& name_or_path,
                                const std::vector<std::string>& search_dirs);

// directory holding the bundled scenarios (compile-time default, overridable
// through COOP_PIC_SCENARIO_DIR)
std::string BundledScenarioDir();

}  // namespace coop_pic

#endif  // COOP_PIC_SCENARIO_H_
