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

#ifndef COOP_PIC_RNG_H_
#define COOP_PIC_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace coop_pic {

// SplitMix64 finalizer; bijective 64-bit mixing.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a substream seed from a base seed and an ordered key path such as
// (purpose, trial, cycle, agent, rollout). Different paths give unrelated
// seeds; the result never depends on the order work is scheduled in.
constexpr std::uint64_t DeriveSeed(std::uint64_t base,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = Mix64(base);
  for (std::uint64_t k : path) h = Mix64(h ^ Mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

// tags separating the substream families derived from one scenario seed
enum class StreamPurpose : std::uint64_t {
  kTrial = 1,
  kRollout = 2,
  kWorld = 3,
  kCentralized = 4,
  kOracle = 5,
};

// Counter-based SplitMix64 stream satisfying UniformRandomBitGenerator, so it
// plugs into <random> distributions. Cheap to construct, which is what lets
// every (cycle, agent, rollout) own a private stream.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double StandardNormal() { return normal_(*this); }

 private:
  std::uint64_t state_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace coop_pic

#endif  // COOP_PIC_RNG_H_
