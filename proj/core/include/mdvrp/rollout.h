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

#ifndef MDVRP_ROLLOUT_H_
#define MDVRP_ROLLOUT_H_

#include <vector>

#include "mdvrp/env.h"
#include "mdvrp/policy.h"

namespace mdvrp {

struct RolloutOptions {
  StartMode starts = StartMode::kTrain;
  DecodeMode mode = DecodeMode::kGreedy;
  EnvOptions env;
};

struct TapedRollout {
  std::vector<Trajectory> trajectories;
  // N x 1 column: sum of the log-probabilities of every policy decision.
  ad::Var log_likelihood;
};

// Runs all start states of `instance` to completion in lockstep on the
// policy's tape. With `replay`, row r follows replay[r] (a full action list
// including the forced start) instead of selecting; a replayed action that
// the mask forbids throws std::invalid_argument.
TapedRollout RolloutOnTape(const BoundPolicy& policy, const Instance& instance, const RolloutOptions& options,
                           Rng& rng, const std::vector<std::vector<int>>* replay = nullptr);

// Same, on a private tape.
std::vector<Trajectory> Rollout(const PolicyParams& params, const Instance& instance,
                                const RolloutOptions& options, Rng& rng);

struct EvalResult {
  double best_cost = 0.0;
  Solution best;      // node indices are shared by all augmentations
  int best_augmentation = 0;
  int num_trajectories = 0;
};

// Greedy multi-start decoding, optionally over the 8 dihedral maps of the
// instance; the minimum-cost trajectory wins (ties keep the earliest).
EvalResult EvaluateGreedy(const PolicyParams& params, const Instance& instance, StartMode starts,
                          bool augment8, const EnvOptions& env = {});

}  // namespace mdvrp

#endif  // MDVRP_ROLLOUT_H_
