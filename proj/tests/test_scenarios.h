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

#ifndef COOP_PIC_TESTS_TEST_SCENARIOS_H_
#define COOP_PIC_TESTS_TEST_SCENARIOS_H_

#include <string>

namespace coop_pic::testing {

// short 3-UAV loop flight, cheap enough for unit tests
inline std::string SmallLoopYaml(const std::string& extra_costs = "",
                                 const std::string& extra_run = "") {
  return R"(name: small_loop
agents: 3
edges: [[1, 2], [2, 3], [1, 3]]
model:
  kind: unicycle
  noise: [0.1, 0.05]
  sampling_noise: [0.75, 0.65]
initial_states:
  - [5, 5, 0.3, 0]
  - [5, 20, 0.3, 0]
  - [5, 35, 0.3, 0]
horizon:
  t_final: 1.0
  period: 0.2
  segments: 4
  rollouts: 50
costs:
  goals: [[35, 20, 0, 0]]
  goal_weights: [0.7, 0.9, 0.7]
  pair_weights: [[1, 3, 1.4], [3, 1, 1.4]]
  regularizers: {mode: zero}
)" + extra_costs +
         R"(run:
  trials: 2
  seed: 17
)" + extra_run;
}

}  // namespace coop_pic::testing

#endif  // COOP_PIC_TESTS_TEST_SCENARIOS_H_
