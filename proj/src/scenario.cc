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

#include "coop_pic/scenario.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include "coop_pic/error.h"

#ifndef COOP_PIC_DEFAULT_SCENARIO_DIR
#define COOP_PIC_DEFAULT_SCENARIO_DIR "scenarios"
#endif

namespace coop_pic {
namespace {

std::string Join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string Index(const std::string& parent, std::size_t k) {
  return fmt::format("{}[{}]", parent, k);
}

template <typename T>
T As(const YAML::Node& node, const std::string& path) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError(path, "value has the wrong type");
  }
}

YAML::Node Required(const YAML::Node& parent, const std::string& key,
                    const std::string& path) {
  YAML::Node node = parent[key];
  if (!node || node.IsNull()) {
    throw ValidationError(Join(path, key), "required field is missing");
  }
  return node;
}

// rejects keys outside `allowed`, so misspelled fields fail loudly
void CheckKeys(const YAML::Node& node, const std::string& path,
               std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ValidationError(path, "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ValidationError(Join(path, key), "unknown field");
  }
}

template <typename T>
T Optional(const YAML::Node& parent, const std::string& key,
           const std::string& path, T fallback) {
  YAML::Node node = parent[key];
  if (!node || node.IsNull()) return fallback;
  return As<T>(node, Join(path, key));
}

std::vector<double> Doubles(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) throw ValidationError(path, "expected a list");
  std::vector<double> out;
  for (std::size_t k = 0; k < node.size(); ++k) {
    double v = As<double>(node[k], Index(path, k));
    if (!std::isfinite(v)) throw ValidationError(Index(path, k), "not finite");
    out.push_back(v);
  }
  return out;
}

Eigen::VectorXd Vector(const YAML::Node& node, const std::string& path) {
  std::vector<double> v = Doubles(node, path);
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<int>(v.size()));
}

// one-based agent index -> zero-based, range checked
int AgentIndex(const YAML::Node& node, const std::string& path, int n) {
  int a = As<int>(node, path);
  if (a < 1 || a > n) {
    throw ValidationError(path, fmt::format("agent {} outside 1..{}", a, n));
  }
  return a - 1;
}

AgentPair Pair(const YAML::Node& node, const std::string& path, int n) {
  if (!node.IsSequence() || node.size() < 2) {
    throw ValidationError(path, "expected [i, j, ...]");
  }
  return {AgentIndex(node[0], Index(path, 0), n),
          AgentIndex(node[1], Index(path, 1), n)};
}

std::shared_ptr<const AgentModel> BuildModel(const ModelParams& p,
                                             const std::string& path) {
  auto need = [&](const std::vector<double>& v, std::size_t k,
                  const std::string& field) {
    if (v.size() != k) {
      throw ValidationError(Join(path, field),
                            fmt::format("{} model needs {} values, got {}",
                                        p.kind, k, v.size()));
    }
  };
  try {
    if (p.kind == "unicycle") {
      need(p.noise, 2, "noise");
      need(p.sampling_noise, 2, "sampling_noise");
      return std::make_shared<UnicycleModel>(p.noise[0], p.noise[1],
                                             p.sampling_noise[0],
                                             p.sampling_noise[1]);
    }
    if (p.kind == "integrator1d") {
      need(p.noise, 1, "noise");
      need(p.sampling_noise, 1, "sampling_noise");
      return std::make_shared<ScalarIntegratorModel>(p.noise[0],
                                                     p.sampling_noise[0]);
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(path, e.what());
  }
  throw ValidationError(Join(path, "kind"),
                        fmt::format("unknown model kind '{}'", p.kind));
}

// accepts a full state or a position-only vector (padded with zeros)
Eigen::VectorXd StateVector(const YAML::Node& node, const std::string& path,
                            const AgentModel& model, bool allow_position) {
  Eigen::VectorXd v = Vector(node, path);
  if (v.size() == model.state_dim()) return v;
  if (allow_position && v.size() == model.position_dim()) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(model.state_dim());
    full.head(model.position_dim()) = v;
    return full;
  }
  throw ValidationError(path, fmt::format("expected {} state values, got {}",
                                          model.state_dim(), v.size()));
}

std::vector<Eigen::VectorXd> PerAgentStates(const YAML::Node& node,
                                            const std::string& path, int n,
                                            const AgentModel& model,
                                            bool broadcast) {
  if (!node.IsSequence()) throw ValidationError(path, "expected a list");
  const auto count = static_cast<int>(node.size());
  if (!(count == n || (broadcast && count == 1))) {
    throw ValidationError(
        path, fmt::format("expected {} entries{}, got {}", n,
                          broadcast ? " (or 1 shared)" : "", count));
  }
  std::vector<Eigen::VectorXd> out;
  for (int a = 0; a < n; ++a) {
    int k = count == 1 ? 0 : a;
    out.push_back(StateVector(node[k], Index(path, k), model, broadcast));
  }
  return out;
}

RegularizerMode ParseRegularizerMode(const std::string& s,
                                     const std::string& path) {
  if (s == "zero") return RegularizerMode::kZero;
  if (s == "initial") return RegularizerMode::kInitial;
  if (s == "explicit") return RegularizerMode::kExplicit;
  throw ValidationError(path, fmt::format("unknown regularizer mode '{}'", s));
}

std::string ToString(RegularizerMode m) {
  switch (m) {
    case RegularizerMode::kZero:
      return "zero";
    case RegularizerMode::kInitial:
      return "initial";
    case RegularizerMode::kExplicit:
      return "explicit";
  }
  return "zero";
}

ControlWeightMode ParseControlWeightMode(const std::string& s,
                                         const std::string& path) {
  if (s == "derived") return ControlWeightMode::kDerived;
  if (s == "explicit_lenient") return ControlWeightMode::kExplicitLenient;
  if (s == "explicit_strict") return ControlWeightMode::kExplicitStrict;
  throw ValidationError(path,
                        fmt::format("unknown control weight mode '{}'", s));
}

std::string ToString(ControlWeightMode m) {
  switch (m) {
    case ControlWeightMode::kDerived:
      return "derived";
    case ControlWeightMode::kExplicitLenient:
      return "explicit_lenient";
    case ControlWeightMode::kExplicitStrict:
      return "explicit_strict";
  }
  return "derived";
}

void ParseCosts(const YAML::Node& node, Scenario& sc) {
  const std::string path = "costs";
  const int n = sc.size();
  const AgentModel& model = *sc.model;
  CostSpec& c = sc.costs;
  CheckKeys(node, path,
            {"lambda", "goals", "goal_weights", "pair_weights", "regularizers",
             "obstacles", "terminal", "control_weight"});

  if (node["lambda"] && !node["lambda"].IsNull()) {
    c.lambda = As<double>(node["lambda"], "costs.lambda");
    if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) {
      throw ValidationError("costs.lambda", "must be positive and finite");
    }
  } else {
    c.lambda = 1.0;
    spdlog::info("{}: costs.lambda not given, using 1", sc.name);
  }

  c.goals = PerAgentStates(Required(node, "goals", path), "costs.goals", n,
                           model, true);

  c.goal_weights.assign(n, 0.0);
  if (YAML::Node gw = node["goal_weights"]; gw && !gw.IsNull()) {
    std::vector<double> w = Doubles(gw, "costs.goal_weights");
    if (static_cast<int>(w.size()) == 1) w.assign(n, w[0]);
    if (static_cast<int>(w.size()) != n) {
      throw ValidationError("costs.goal_weights",
                            fmt::format("expected {} weights", n));
    }
    for (int a = 0; a < n; ++a) {
      if (w[a] < 0.0) {
        throw ValidationError(Index("costs.goal_weights", a), "must be >= 0");
      }
    }
    c.goal_weights = w;
  }

  c.pair_weights.clear();
  if (YAML::Node pw = node["pair_weights"]; pw && !pw.IsNull()) {
    if (!pw.IsSequence()) {
      throw ValidationError("costs.pair_weights", "expected [[i, j, w], ...]");
    }
    for (std::size_t k = 0; k < pw.size(); ++k) {
      const std::string p = Index("costs.pair_weights", k);
      if (!pw[k].IsSequence() || pw[k].size() != 3) {
        throw ValidationError(p, "expected [i, j, w]");
      }
      AgentPair ij = Pair(pw[k], p, n);
      double w = As<double>(pw[k][2], Index(p, 2));
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw ValidationError(p, "weight must be finite and >= 0");
      }
      if (ij.first == ij.second) {
        throw ValidationError(p, "pair weight needs two distinct agents");
      }
      if (w > 0.0 && !sc.graph.HasEdge(ij.first, ij.second)) {
        throw ValidationError(
            p, fmt::format("w_{}{} > 0 but ({}, {}) is not an edge",
                           ij.first + 1, ij.second + 1, ij.first + 1,
                           ij.second + 1));
      }
      if (c.pair_weights.count(ij)) {
        throw ValidationError(p, "duplicate pair weight");
      }
      c.pair_weights[ij] = w;
    }
  }

  // regularizers
  YAML::Node reg = node["regularizers"];
  if (reg && !reg.IsNull()) {
    CheckKeys(reg, "costs.regularizers",
              {"mode", "resolved_from", "goal", "pairs"});
  }
  std::string mode = "initial";
  if (reg && reg["mode"]) mode = As<std::string>(reg["mode"], "costs.regularizers.mode");
  sc.regularizer_mode = ParseRegularizerMode(mode, "costs.regularizers.mode");
  c.goal_regularizers.assign(n, 0.0);
  c.pair_regularizers.clear();
  const int pd = model.position_dim();
  switch (sc.regularizer_mode) {
    case RegularizerMode::kZero:
      break;
    case RegularizerMode::kInitial:
      for (int a = 0; a < n; ++a) {
        c.goal_regularizers[a] =
            (sc.initial_states[a].head(pd) - c.goals[a].head(pd)).norm();
      }
      for (const auto& [ij, w] : c.pair_weights) {
        c.pair_regularizers[ij] = (sc.initial_states[ij.first].head(pd) -
                                   sc.initial_states[ij.second].head(pd))
                                      .norm();
      }
      break;
    case RegularizerMode::kExplicit: {
      if (YAML::Node g = reg["goal"]; g && !g.IsNull()) {
        std::vector<double> d = Doubles(g, "costs.regularizers.goal");
        if (static_cast<int>(d.size()) != n) {
          throw ValidationError("costs.regularizers.goal",
                                fmt::format("expected {} values", n));
        }
        c.goal_regularizers = d;
      }
      if (YAML::Node pr = reg["pairs"]; pr && !pr.IsNull()) {
        for (std::size_t k = 0; k < pr.size(); ++k) {
          const std::string p = Index("costs.regularizers.pairs", k);
          if (!pr[k].IsSequence() || pr[k].size() != 3) {
            throw ValidationError(p, "expected [i, j, d]");
          }
          c.pair_regularizers[Pair(pr[k], p, n)] =
              As<double>(pr[k][2], Index(p, 2));
        }
      }
      break;
    }
  }
  for (int a = 0; a < n; ++a) {
    if (!(c.goal_regularizers[a] >= 0.0) ||
        !std::isfinite(c.goal_regularizers[a])) {
      throw ValidationError(Index("costs.regularizers.goal", a),
                            "must be finite and >= 0");
    }
  }
  for (const auto& [ij, d] : c.pair_regularizers) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw ValidationError("costs.regularizers.pairs",
                            "must be finite and >= 0");
    }
  }

  c.obstacles.clear();
  if (YAML::Node obs = node["obstacles"]; obs && !obs.IsNull()) {
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const std::string p = Index("costs.obstacles", k);
      CheckKeys(obs[k], p, {"lo", "hi", "penalty"});
      Obstacle o;
      o.lo = Vector(Required(obs[k], "lo", p), Join(p, "lo"));
      o.hi = Vector(Required(obs[k], "hi", p), Join(p, "hi"));
      o.penalty = As<double>(Required(obs[k], "penalty", p), Join(p, "penalty"));
      if (o.lo.size() != pd || o.hi.size() != pd) {
        throw ValidationError(p, fmt::format("corners need {} coordinates", pd));
      }
      if ((o.hi.array() < o.lo.array()).any()) {
        throw ValidationError(p, "hi must be >= lo");
      }
      if (!(o.penalty >= 0.0)) throw ValidationError(p, "penalty must be >= 0");
      c.obstacles.push_back(o);
    }
  }

  c.terminal = {};
  if (YAML::Node term = node["terminal"]; term && !term.IsNull()) {
    CheckKeys(term, "costs.terminal", {"kind", "kappa"});
    std::string kind = Optional<std::string>(term, "kind", "costs.terminal",
                                             "zero");
    if (kind == "zero") {
      c.terminal.kind = TerminalKind::kZero;
    } else if (kind == "quadratic") {
      c.terminal.kind = TerminalKind::kQuadratic;
      c.terminal.kappa =
          As<double>(Required(term, "kappa", "costs.terminal"),
                     "costs.terminal.kappa");
      if (!(c.terminal.kappa >= 0.0)) {
        throw ValidationError("costs.terminal.kappa", "must be >= 0");
      }
    } else {
      throw ValidationError("costs.terminal.kind",
                            fmt::format("unknown terminal cost '{}'", kind));
    }
  }

  // control weight: derived from the sampling noise, optionally checked
  // against a supplied matrix
  Eigen::MatrixXd derived;
  sc.control_weight_mismatch = 0.0;
  sc.control_weight_mode = ControlWeightMode::kDerived;
  if (model.sampling_noise().isZero(0.0)) {
    // no exploration at all: R is undefined and every planned control is 0
    spdlog::warn("{}: sampling noise is zero; planned controls are all zero",
                 sc.name);
    sc.control_weight.resize(0, 0);
    return;
  }
  try {
    derived = DeriveControlWeight(model.sampling_noise(), c.lambda);
  } catch (const ValidationError& e) {
    throw ValidationError("model.sampling_noise", e.what());
  }
  sc.control_weight = derived;
  if (YAML::Node cw = node["control_weight"]; cw && !cw.IsNull()) {
    CheckKeys(cw, "costs.control_weight", {"mode", "matrix"});
    sc.control_weight_mode = ParseControlWeightMode(
        Optional<std::string>(cw, "mode", "costs.control_weight", "derived"),
        "costs.control_weight.mode");
    if (sc.control_weight_mode != ControlWeightMode::kDerived) {
      YAML::Node m = Required(cw, "matrix", "costs.control_weight");
      const int p = model.input_dim();
      if (!m.IsSequence() || static_cast<int>(m.size()) != p) {
        throw ValidationError("costs.control_weight.matrix",
                              fmt::format("expected {} rows", p));
      }
      Eigen::MatrixXd r(p, p);
      for (int i = 0; i < p; ++i) {
        std::vector<double> row =
            Doubles(m[i], Index("costs.control_weight.matrix", i));
        if (static_cast<int>(row.size()) != p) {
          throw ValidationError(Index("costs.control_weight.matrix", i),
                                fmt::format("expected {} columns", p));
        }
        for (int j = 0; j < p; ++j) r(i, j) = row[j];
      }
      if (!r.isApprox(r.transpose(), 1e-12) ||
          Eigen::LLT<Eigen::MatrixXd>(r).info() != Eigen::Success) {
        throw ValidationError("costs.control_weight.matrix",
                              "must be symmetric positive definite");
      }
      sc.control_weight = r;
      sc.control_weight_mismatch = ControlWeightMismatch(r, derived);
      if (sc.control_weight_mismatch > kControlWeightTolerance) {
        const std::string msg = fmt::format(
            "supplied R differs from lambda (sigma_s sigma_s^T)^-1 by {:.3g} "
            "(relative); planning weights follow the sampling noise",
            sc.control_weight_mismatch);
        if (sc.control_weight_mode == ControlWeightMode::kExplicitStrict) {
          throw ValidationError("costs.control_weight.matrix", msg);
        }
        spdlog::warn("{}: {}", sc.name, msg);
      }
    }
  }
}

void ParseHorizon(const YAML::Node& node, Scenario& sc) {
  const std::string path = "horizon";
  CheckKeys(node, path,
            {"t0", "t_final", "period", "segments", "rollouts",
             "exit_goal_radius"});
  sc.t0 = Optional<double>(node, "t0", path, 0.0);
  sc.t_final = As<double>(Required(node, "t_final", path), "horizon.t_final");
  sc.period = Optional<double>(node, "period", path, 0.2);
  sc.segments = Optional<int>(node, "segments", path, 8);
  sc.rollouts = Optional<int>(node, "rollouts", path, 400);
  if (!(sc.period > 0.0) || !std::isfinite(sc.period)) {
    throw ValidationError("horizon.period", "must be positive");
  }
  if (!(sc.t_final - sc.t0 >= sc.period - 1e-12) || !std::isfinite(sc.t_final)) {
    throw ValidationError("horizon.t_final",
                          "t_final - t0 must be at least one period");
  }
  if (sc.segments < 1) throw ValidationError("horizon.segments", "must be >= 1");
  if (sc.rollouts < 1) throw ValidationError("horizon.rollouts", "must be >= 1");
  sc.exit = {};
  sc.exit.t_final = sc.t_final;
  if (YAML::Node r = node["exit_goal_radius"]; r && !r.IsNull()) {
    double radius = As<double>(r, "horizon.exit_goal_radius");
    if (!(radius > 0.0)) {
      throw ValidationError("horizon.exit_goal_radius", "must be positive");
    }
    sc.exit.goal_radius = radius;
  }
}

void ParseRun(const YAML::Node& node, Scenario& sc) {
  const std::string path = "run";
  CheckKeys(node, path,
            {"trials", "seed", "sampling", "weighting", "ess_warning_fraction",
             "report_pairs", "output_dir", "dump_rollouts"});
  sc.trials = Optional<int>(node, "trials", path, 1);
  if (sc.trials < 1) throw ValidationError("run.trials", "must be >= 1");
  sc.seed = Optional<std::uint64_t>(node, "seed", path, 1);
  std::string sampling =
      Optional<std::string>(node, "sampling", path, "distributed");
  if (sampling == "distributed") {
    sc.sampling = SamplingMode::kDistributed;
  } else if (sampling == "centralized") {
    sc.sampling = SamplingMode::kCentralized;
  } else {
    throw ValidationError("run.sampling",
                          fmt::format("unknown sampling mode '{}'", sampling));
  }
  sc.planner.weighting = ParsePathWeighting(
      Optional<std::string>(node, "weighting", path, "passive_corrected"));
  sc.planner.ess_warning_fraction =
      Optional<double>(node, "ess_warning_fraction", path, 0.05);
  sc.report_pairs.clear();
  if (YAML::Node rp = node["report_pairs"]; rp && !rp.IsNull()) {
    for (std::size_t k = 0; k < rp.size(); ++k) {
      AgentPair ij = Pair(rp[k], Index("run.report_pairs", k), sc.size());
      if (ij.first == ij.second) {
        throw ValidationError(Index("run.report_pairs", k),
                              "needs two distinct agents");
      }
      sc.report_pairs.push_back(ij);
    }
  } else {
    for (const auto& e : sc.graph.edges()) sc.report_pairs.push_back(e);
  }
  sc.output_dir = Optional<std::string>(node, "output_dir", path,
                                        "results/" + sc.name);
  sc.dump_rollouts = Optional<bool>(node, "dump_rollouts", path, false);
}

}  // namespace

Scenario ScenarioFromYaml(const YAML::Node& root, const std::string& source) {
  if (!root.IsMap()) throw ParseError(source + ": top level must be a mapping");
  CheckKeys(root, "",
            {"name", "agents", "edges", "model", "initial_states", "horizon",
             "costs", "run"});
  Scenario sc;
  sc.source_path = source;
  sc.name = Optional<std::string>(
      root, "name", "",
      std::filesystem::path(source).stem().string());

  const int n = As<int>(Required(root, "agents", ""), "agents");
  if (n < 1) throw ValidationError("agents", "must be >= 1");
  std::vector<CommGraph::Edge> edges;
  if (YAML::Node e = root["edges"]; e && !e.IsNull()) {
    if (!e.IsSequence()) throw ValidationError("edges", "expected [[i, j], ...]");
    for (std::size_t k = 0; k < e.size(); ++k) {
      const std::string p = Index("edges", k);
      if (!e[k].IsSequence() || e[k].size() != 2) {
        throw ValidationError(p, "expected [i, j]");
      }
      edges.emplace_back(As<int>(e[k][0], Index(p, 0)) - 1,
                         As<int>(e[k][1], Index(p, 1)) - 1);
    }
  }
  try {
    sc.graph = CommGraph(n, edges);
  } catch (const ValidationError& err) {
    throw ValidationError("edges", err.what());
  } catch (const Error& err) {
    throw ValidationError("edges", err.what());
  }

  YAML::Node model = Required(root, "model", "");
  CheckKeys(model, "model", {"kind", "noise", "sampling_noise"});
  sc.model_params.kind =
      Optional<std::string>(model, "kind", "model", "unicycle");
  sc.model_params.noise = Doubles(Required(model, "noise", "model"), "model.noise");
  if (YAML::Node s = model["sampling_noise"]; s && !s.IsNull()) {
    sc.model_params.sampling_noise = Doubles(s, "model.sampling_noise");
  } else {
    sc.model_params.sampling_noise = sc.model_params.noise;
  }
  sc.model = BuildModel(sc.model_params, "model");

  sc.initial_states = PerAgentStates(Required(root, "initial_states", ""),
                                     "initial_states", n, *sc.model, false);
  // horizon before costs is harmless; costs need initial states
  ParseHorizon(Required(root, "horizon", ""), sc);
  ParseCosts(Required(root, "costs", ""), sc);
  YAML::Node run = root["run"];
  ParseRun(run ? run : YAML::Node(YAML::NodeType::Map), sc);
  return sc;
}

Scenario ScenarioFromString(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(fmt::format("{}: {}", source, e.what()));
  }
  return ScenarioFromYaml(root, source);
}

Scenario LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot read scenario '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ScenarioFromString(buffer.str(), path);
}

// ----- echo ----- //

namespace {

void EmitVector(YAML::Emitter& out, const Eigen::VectorXd& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (int c = 0; c < v.size(); ++c) out << v[c];
  out << YAML::EndSeq;
}

void EmitDoubles(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << x;
  out << YAML::EndSeq;
}

}  // namespace

std::string ScenarioToYaml(const Scenario& sc) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << sc.name;
  out << YAML::Key << "agents" << YAML::Value << sc.size();
  out << YAML::Key << "edges" << YAML::Value << YAML::BeginSeq;
  for (const auto& [a, b] : sc.graph.edges()) {
    out << YAML::Flow << YAML::BeginSeq << a + 1 << b + 1 << YAML::EndSeq;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << sc.model_params.kind;
  out << YAML::Key << "noise" << YAML::Value;
  EmitDoubles(out, sc.model_params.noise);
  out << YAML::Key << "sampling_noise" << YAML::Value;
  EmitDoubles(out, sc.model_params.sampling_noise);
  out << YAML::EndMap;

  out << YAML::Key << "initial_states" << YAML::Value << YAML::BeginSeq;
  for (const auto& x : sc.initial_states) EmitVector(out, x);
  out << YAML::EndSeq;

  out << YAML::Key << "horizon" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "t0" << YAML::Value << sc.t0;
  out << YAML::Key << "t_final" << YAML::Value << sc.t_final;
  out << YAML::Key << "period" << YAML::Value << sc.period;
  out << YAML::Key << "segments" << YAML::Value << sc.segments;
  out << YAML::Key << "rollouts" << YAML::Value << sc.rollouts;
  if (sc.exit.goal_radius) {
    out << YAML::Key << "exit_goal_radius" << YAML::Value << *sc.exit.goal_radius;
  }
  out << YAML::EndMap;

  const CostSpec& c = sc.costs;
  out << YAML::Key << "costs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lambda" << YAML::Value << c.lambda;
  out << YAML::Key << "goals" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : c.goals) EmitVector(out, g);
  out << YAML::EndSeq;
  out << YAML::Key << "goal_weights" << YAML::Value;
  EmitDoubles(out, c.goal_weights);
  out << YAML::Key << "pair_weights" << YAML::Value << YAML::BeginSeq;
  for (const auto& [ij, w] : c.pair_weights) {
    out << YAML::Flow << YAML::BeginSeq << ij.first + 1 << ij.second + 1 << w
        << YAML::EndSeq;
  }
  out << YAML::EndSeq;
  // regularizers are always echoed resolved, so the echo does not depend on
  // the initial states it was derived from
  out << YAML::Key << "regularizers" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << "explicit";
  out << YAML::Key << "resolved_from" << YAML::Value
      << ToString(sc.regularizer_mode);
  out << YAML::Key << "goal" << YAML::Value;
  EmitDoubles(out, c.goal_regularizers);
  out << YAML::Key << "pairs" << YAML::Value << YAML::BeginSeq;
  for (const auto& [ij, d] : c.pair_regularizers) {
    out << YAML::Flow << YAML::BeginSeq << ij.first + 1 << ij.second + 1 << d
        << YAML::EndSeq;
  }
  out << YAML::EndSeq << YAML::EndMap;
  out << YAML::Key << "obstacles" << YAML::Value << YAML::BeginSeq;
  for (const auto& o : c.obstacles) {
    out << YAML::BeginMap;
    out << YAML::Key << "lo" << YAML::Value;
    EmitVector(out, o.lo);
    out << YAML::Key << "hi" << YAML::Value;
    EmitVector(out, o.hi);
    out << YAML::Key << "penalty" << YAML::Value << o.penalty;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "terminal" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value
      << (c.terminal.kind == TerminalKind::kQuadratic ? "quadratic" : "zero");
  if (c.terminal.kind == TerminalKind::kQuadratic) {
    out << YAML::Key << "kappa" << YAML::Value << c.terminal.kappa;
  }
  out << YAML::EndMap;
  out << YAML::Key << "control_weight" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << ToString(sc.control_weight_mode);
  if (sc.control_weight_mode != ControlWeightMode::kDerived) {
    out << YAML::Key << "matrix" << YAML::Value << YAML::BeginSeq;
    for (int i = 0; i < sc.control_weight.rows(); ++i) {
      EmitVector(out, sc.control_weight.row(i).transpose());
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "trials" << YAML::Value << sc.trials;
  out << YAML::Key << "seed" << YAML::Value << sc.seed;
  out << YAML::Key << "sampling" << YAML::Value
      << (sc.sampling == SamplingMode::kCentralized ? "centralized"
                                                    : "distributed");
  out << YAML::Key << "weighting" << YAML::Value
      << ToString(sc.planner.weighting);
  out << YAML::Key << "ess_warning_fraction" << YAML::Value
      << sc.planner.ess_warning_fraction;
  out << YAML::Key << "report_pairs" << YAML::Value << YAML::BeginSeq;
  for (const auto& [a, b] : sc.report_pairs) {
    out << YAML::Flow << YAML::BeginSeq << a + 1 << b + 1 << YAML::EndSeq;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "output_dir" << YAML::Value << sc.output_dir;
  out << YAML::Key << "dump_rollouts" << YAML::Value << sc.dump_rollouts;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ----- lookup ----- //

std::string ResolveScenarioPath(const std::string& name_or_path,
                                const std::vector<std::string>& search_dirs) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(name_or_path)) return name_or_path;
  for (const auto& dir : search_dirs) {
    for (const char* ext : {".yaml", ".yml", ""}) {
      fs::path candidate = fs::path(dir) / (name_or_path + ext);
      if (fs::is_regular_file(candidate)) return candidate.string();
    }
  }
  throw ParseError(fmt::format("scenario '{}' not found", name_or_path));
}

std::string BundledScenarioDir() {
  if (const char* env = std::getenv("COOP_PIC_SCENARIO_DIR"); env && *env) {
    return env;
  }
  return COOP_PIC_DEFAULT_SCENARIO_DIR;
}

}  // namespace coop_pic
