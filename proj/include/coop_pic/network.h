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

#ifndef COOP_PIC_NETWORK_H_
#define COOP_PIC_NETWORK_H_

#include <optional>
#include <utility>
#include <vector>

namespace coop_pic {

// Undirected, connected communication graph over agents 0..N-1.
//
// Agent indices are zero-based inside the library; scenario files and CSV
// output use one-based indices and convert at the boundary.
class CommGraph {
 public:
  using Edge = std::pair<int, int>;

  // throws ValidationError on self-loops, out-of-range endpoints or a
  // disconnected graph. duplicate edges (in either orientation) are merged.
  CommGraph(int n_agents, const std::vector<Edge>& edges);

  int size() const { return n_agents_; }

  // edges with first < second, sorted
  const std::vector<Edge>& edges() const { return edges_; }

  bool HasEdge(int i, int j) const;

  // ascending neighbor list of agent i; throws IndexError
  const std::vector<int>& Neighbors(int i) const;

 private:
  void CheckIndex(int i) const;

  int n_agents_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

// Factorial subsystem of a center agent: the center followed by its
// neighbors in ascending order. This order is the stacking order of every
// joint vector and matrix built for the subsystem.
struct Subsystem {
  int center = 0;
  std::vector<int> members;

  int size() const { return static_cast<int>(members.size()); }

  // position of `agent` inside members, if present
  std::optional<int> PositionOf(int agent) const;
};

// neighbor set N_i
const std::vector<int>& Neighbors(const CommGraph& graph, int i);

// subsystem {i} ∪ N_i
Subsystem MakeSubsystem(const CommGraph& graph, int i);

}  // namespace coop_pic

#endif  // COOP_PIC_NETWORK_H_
