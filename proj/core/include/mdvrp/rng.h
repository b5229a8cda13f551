// Copyright 2026 The mdvrp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MDVRP_RNG_H_
#define MDVRP_RNG_H_

#include <cstdint>
#include <initializer_list>

namespace mdvrp {

// SplitMix64 as a counter-based generator: the k-th output of a stream with
// key `seed` is Mix(seed + k * 0x9E3779B97F4A7C15). Every consumer in the
// library draws from this generator only, so a fixed seed reproduces
// identical instances, rollouts and checkpoints on any platform.
class Rng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  // Independent stream keyed by a seed and a path of counters, e.g.
  // Rng::Derive(seed, {epoch, batch, item}).
  static Rng Derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  static std::uint64_t Mix(std::uint64_t z);

  std::uint64_t Next() {
    state_ += kGamma;
    return Mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi]; returns lo when hi <= lo.
  double Uniform(double lo, double hi) {
    if (!(hi > lo)) return lo;
    return lo + (hi - lo) * Uniform();
  }

  // Uniform integer on [0, bound) via Lemire's multiply-and-reject.
  std::uint64_t Below(std::uint64_t bound);

  // Uniform integer on [lo, hi].
  std::int64_t Between(std::int64_t lo, std::int64_t hi);

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace mdvrp

#endif  // MDVRP_RNG_H_
