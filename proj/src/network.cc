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

#include "coop_pic/network.h"

#include <algorithm>
#include <queue>

#include <fmt/format.h>

#include "coop_pic/error.h"

namespace coop_pic {

CommGraph::CommGraph(int n_agents, const std::vector<Edge>& edges)
    : n_agents_(n_agents) {
  if (n_agents < 1) {
    throw ValidationError("graph.agents", "need at least one agent");
  }
  adjacency_.resize(n_agents);
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n_agents || b < 0 || b >= n_agents) {
      throw ValidationError(
          "graph.edges", fmt::format("edge ({}, {}) outside 1..{}", a + 1,
                                     b + 1, n_agents));
    }
    if (a == b) {
      throw ValidationError("graph.edges",
                            fmt::format("self-loop on agent {}", a + 1));
    }
    edges_.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const auto& [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());

  // connectivity by breadth-first search from agent 0
  std::vector<bool> seen(n_agents, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int reached = 1;
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  if (reached != n_agents) {
    throw ValidationError(
        "graph.edges",
        fmt::format("graph is not connected ({} of {} agents reachable "
                    "from agent 1)",
                    reached, n_agents));
  }
}

void CommGraph::CheckIndex(int i) const {
  if (i < 0 || i >= n_agents_) {
    throw IndexError(fmt::format("agent index {} outside 1..{}", i + 1,
                                 n_agents_));
  }
}

bool CommGraph::HasEdge(int i, int j) const {
  CheckIndex(i);
  CheckIndex(j);
  const auto& list = adjacency_[i];
  return std::binary_search(list.begin(), list.end(), j);
}

const std::vector<int>& CommGraph::Neighbors(int i) const {
  CheckIndex(i);
  return adjacency_[i];
}

std::optional<int> Subsystem::PositionOf(int agent) const {
  auto it = std::find(members.begin(), members.end(), agent);
  if (it == members.end()) return std::nullopt;
  return static_cast<int>(it - members.begin());
}

const std::vector<int>& Neighbors(const CommGraph& graph, int i) {
  return graph.Neighbors(i);
}

Subsystem MakeSubsystem(const CommGraph& graph, int i) {
  Subsystem sub;
  sub.center = i;
  const auto& nbrs = graph.Neighbors(i);
  sub.members.reserve(nbrs.size() + 1);
  sub.members.push_back(i);
  sub.members.insert(sub.members.end(), nbrs.begin(), nbrs.end());
  return sub;
}

}  // namespace coop_pic
