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

#include <gtest/gtest.h>

#include "coop_pic/error.h"

namespace coop_pic {
namespace {

CommGraph Loop3() { return CommGraph(3, {{0, 1}, {1, 2}, {0, 2}}); }

CommGraph Line(int n) {
  std::vector<CommGraph::Edge> edges;
  for (int k = 0; k + 1 < n; ++k) edges.push_back({k, k + 1});
  return CommGraph(n, edges);
}

TEST(NetworkTest, LoopNeighbors) {
  EXPECT_EQ(Neighbors(Loop3(), 0), (std::vector<int>{1, 2}));
}

TEST(NetworkTest, SingleAgentHasNoNeighbors) {
  CommGraph g(1, {});
  EXPECT_TRUE(Neighbors(g, 0).empty());
  EXPECT_EQ(MakeSubsystem(g, 0).members, (std::vector<int>{0}));
}

TEST(NetworkTest, LineNeighbors) {
  EXPECT_EQ(Neighbors(Line(9), 4), (std::vector<int>{3, 5}));
}

TEST(NetworkTest, SubsystemOrderIsCenterThenAscending) {
  EXPECT_EQ(MakeSubsystem(Loop3(), 0).members, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(MakeSubsystem(Loop3(), 1).members, (std::vector<int>{1, 0, 2}));
  EXPECT_EQ(MakeSubsystem(Line(9), 8).members, (std::vector<int>{8, 7}));
}

TEST(NetworkTest, PositionOf) {
  Subsystem s = MakeSubsystem(Loop3(), 2);
  EXPECT_EQ(s.PositionOf(2), 0);
  EXPECT_EQ(s.PositionOf(0), 1);
  EXPECT_FALSE(MakeSubsystem(Line(9), 0).PositionOf(5).has_value());
}

TEST(NetworkTest, DuplicateEdgesMerge) {
  CommGraph g(2, {{0, 1}, {1, 0}, {0, 1}});
  EXPECT_EQ(g.edges().size(), 1u);
  EXPECT_TRUE(g.HasEdge(1, 0));
}

TEST(NetworkTest, RejectsBadGraphs) {
  EXPECT_THROW(CommGraph(2, {{0, 0}, {0, 1}}), ValidationError);
  EXPECT_THROW(CommGraph(2, {{0, 2}}), ValidationError);
  EXPECT_THROW(CommGraph(3, {{0, 1}}), ValidationError);
  EXPECT_THROW(CommGraph(0, {}), ValidationError);
}

TEST(NetworkTest, IndexOutOfRange) {
  EXPECT_THROW(Neighbors(Loop3(), 3), IndexError);
  EXPECT_THROW(Neighbors(Loop3(), -1), IndexError);
}

}  // namespace
}  // namespace coop_pic
