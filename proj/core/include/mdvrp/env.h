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

#ifndef MDVRP_ENV_H_
#define MDVRP_ENV_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mdvrp/feasibility.h"
#include "mdvrp/instance.h"

namespace mdvrp {

enum class Phase { kRouteActive, kAwaitingAnchor, kDone };

// How POMO start states are enumerated.
//   kTrain:     m + n - 1 starts (depots 1..m-1, then every customer from depot 0)
//   kInference: m * n starts (every depot / first-customer pair)
enum class StartMode { kTrain, kInference };

inline constexpr int kNoNode = -1;

// Per-trajectory dynamic state. Capacity quantities are normalized: a fresh
// vehicle has remaining_capacity 1.
struct RolloutState {
  int position = kNoNode;
  int anchor = kNoNode;
  Phase phase = Phase::kAwaitingAnchor;
  // 1 minus the peak on-board load of the current segment, with the segment
  // assumed to depart carrying exactly the linehaul it delivers.
  double remaining_capacity = 1.0;
  // Pickups collected since the last depot.
  double pickup_load = 0.0;
  double elapsed_time = 0.0;
  double route_length = 0.0;
  std::vector<std::uint8_t> visited;  // per customer
  int num_visited = 0;
  int served_in_route = 0;
  bool backhaul_in_route = false;
  bool open_flag = false;
  bool inter_depot_flag = false;
  int step = 0;
  double cost = 0.0;
  std::vector<int> actions;
  int forced_prefix = 0;  // leading actions fixed by the start rule

  bool done() const { return phase == Phase::kDone; }
};

struct EnvOptions {
  // Mask reloads while the vehicle is still at full capacity.
  bool suppress_vacuous_reload = true;
};

// Completed trajectory. step_logprobs holds one entry per decision taken by
// the policy (forced start actions are excluded).
struct Trajectory {
  std::vector<int> actions;
  std::vector<double> step_logprobs;
  double cost = 0.0;
  int forced_prefix = 0;

  Solution ToSolution() const { return Solution{actions, cost}; }
};

// Fresh state before any anchor has been chosen.
RolloutState InitialState(const Instance& instance);

// POMO start states with the forced first action(s) already applied.
std::vector<RolloutState> InitRollouts(const Instance& instance, StartMode mode,
                                       const EnvOptions& options = {});

// Mask over all m + n nodes. Throws std::logic_error on a finished state.
std::vector<std::uint8_t> FeasibleActions(const Instance& instance, const RolloutState& state,
                                          const EnvOptions& options = {});
// Allocation-free variant; `mask` must have m + n entries.
void FeasibleActionsInto(const Instance& instance, const RolloutState& state,
                         const EnvOptions& options, std::span<std::uint8_t> mask);

// Applies `action` after verifying it against the mask. Throws
// std::invalid_argument for an infeasible action.
RolloutState Step(const Instance& instance, const RolloutState& state, int action,
                  const EnvOptions& options = {});
void StepInPlace(const Instance& instance, RolloutState& state, int action,
                 const EnvOptions& options = {});
// Applies a pre-validated action without re-computing the mask.
void ApplyUnchecked(const Instance& instance, RolloutState& state, int action);

// Negative total distance of a complete trajectory, obtained by replaying it
// through the environment. Throws std::invalid_argument when the action list
// is incomplete or infeasible.
double Reward(const Instance& instance, const Trajectory& trajectory,
              const EnvOptions& options = {});

Trajectory ToTrajectory(const RolloutState& state);

}  // namespace mdvrp

#endif  // MDVRP_ENV_H_
