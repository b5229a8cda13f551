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

#include "mdvrp/env.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mdvrp {

namespace {

// Vehicle situation used to test whether a customer can be appended.
struct VehicleView {
  int position;
  int anchor;
  double remaining;
  double pickup;
  double time;
  double length;
  bool backhaul_in_route;
};

VehicleView ViewOf(const RolloutState& s) {
  return {s.position, s.anchor, s.remaining_capacity, s.pickup_load,
          s.elapsed_time, s.route_length, s.backhaul_in_route};
}

VehicleView FreshAt(int depot) { return {depot, depot, 1.0, 0.0, 0.0, 0.0, false}; }

// Appending customer c keeps the route completable: capacity, strict
// backhaul order, the route limit including the return leg, the customer's
// latest start and the depot closing time after returning.
bool CanServe(const Instance& inst, const VehicleView& v, int c) {
  const VariantFlags& f = inst.flags;
  const double demand = inst.demand[c];
  if (demand > 0.0) {
    if (demand > v.remaining + kFeasibilityEps) return false;
    if (v.backhaul_in_route && f.backhaul_mode == BackhaulMode::kStrict) return false;
  } else if (v.pickup - demand > 1.0 + kFeasibilityEps) {
    return false;
  }
  const int node = inst.num_depots() + c;
  const double leg = inst.distance(v.position, node);
  const double back = f.open ? 0.0 : inst.distance(node, v.anchor);
  if (f.limit && v.length + leg + back > inst.route_limit + kFeasibilityEps) return false;
  if (f.time_window) {
    const double arrival = v.time + leg;
    if (arrival > inst.tw_late[c] + kFeasibilityEps) return false;
    if (!f.open) {
      const double finish = std::max(arrival, inst.tw_early[c]) + inst.service_time[c];
      if (finish + back > inst.depot_close + kFeasibilityEps) return false;
    }
  }
  return true;
}

bool AnyServable(const Instance& inst, const RolloutState& s, const VehicleView& v) {
  for (int c = 0; c < inst.num_customers(); ++c) {
    if (!s.visited[c] && CanServe(inst, v, c)) return true;
  }
  return false;
}

}  // namespace

RolloutState InitialState(const Instance& instance) {
  RolloutState s;
  s.visited.assign(instance.num_customers(), 0);
  s.open_flag = instance.flags.open;
  s.inter_depot_flag = instance.flags.inter_depot;
  return s;
}

std::vector<RolloutState> InitRollouts(const Instance& instance, StartMode mode,
                                       const EnvOptions& options) {
  const int m = instance.num_depots();
  const int n = instance.num_customers();
  std::vector<RolloutState> states;
  auto start = [&](int depot, int customer) {
    RolloutState s = InitialState(instance);
    StepInPlace(instance, s, depot, options);
    if (customer != kNoNode) StepInPlace(instance, s, customer, options);
    s.forced_prefix = static_cast<int>(s.actions.size());
    states.push_back(std::move(s));
  };
  if (mode == StartMode::kTrain) {
    states.reserve(m + n - 1);
    for (int j = 1; j < m; ++j) start(j, kNoNode);
    for (int c = 0; c < n; ++c) start(0, m + c);
  } else {
    states.reserve(static_cast<std::size_t>(m) * n);
    for (int j = 0; j < m; ++j) {
      for (int c = 0; c < n; ++c) start(j, m + c);
    }
  }
  return states;
}

void FeasibleActionsInto(const Instance& inst, const RolloutState& s, const EnvOptions& options,
                         std::span<std::uint8_t> mask) {
  if (s.done()) throw std::logic_error("FeasibleActions: trajectory already finished");
  const int m = inst.num_depots();
  const int n = inst.num_customers();
  std::fill(mask.begin(), mask.end(), 0);

  if (s.phase == Phase::kAwaitingAnchor) {
    bool any = false;
    for (int j = 0; j < m; ++j) {
      if (AnyServable(inst, s, FreshAt(j))) {
        mask[j] = 1;
        any = true;
      }
    }
    if (!any) throw std::logic_error("FeasibleActions: no depot can serve a remaining customer");
    return;
  }

  const VehicleView view = ViewOf(s);
  bool any_customer = false;
  for (int c = 0; c < n; ++c) {
    if (!s.visited[c] && CanServe(inst, view, c)) {
      mask[m + c] = 1;
      any_customer = true;
    }
  }
  const bool at_customer = s.position >= m;
  if (at_customer || (s.position == s.anchor && s.served_in_route == 0 && !any_customer)) {
    mask[s.anchor] = 1;
  }
  if (inst.flags.inter_depot && at_customer &&
      !(options.suppress_vacuous_reload && s.remaining_capacity >= 1.0 - kFeasibilityEps)) {
    for (int j = 0; j < m; ++j) {
      if (j == s.anchor) continue;
      const double leg = inst.distance(s.position, j);
      VehicleView reloaded = view;
      reloaded.position = j;
      reloaded.remaining = 1.0;
      reloaded.pickup = 0.0;
      reloaded.time += leg;
      reloaded.length += leg;
      if (AnyServable(inst, s, reloaded)) mask[j] = 1;
    }
  }
}

std::vector<std::uint8_t> FeasibleActions(const Instance& instance, const RolloutState& state,
                                          const EnvOptions& options) {
  std::vector<std::uint8_t> mask(instance.num_nodes());
  FeasibleActionsInto(instance, state, options, mask);
  return mask;
}

void ApplyUnchecked(const Instance& inst, RolloutState& s, int action) {
  const int m = inst.num_depots();
  if (s.phase == Phase::kAwaitingAnchor) {
    s.anchor = action;
    s.position = action;
    s.phase = Phase::kRouteActive;
    s.remaining_capacity = 1.0;
    s.pickup_load = 0.0;
    s.elapsed_time = 0.0;
    s.route_length = 0.0;
    s.served_in_route = 0;
    s.backhaul_in_route = false;
  } else if (action >= m) {
    const int c = action - m;
    const double leg = inst.distance(s.position, action);
    s.cost += leg;
    s.route_length += leg;
    s.elapsed_time += leg;
    if (inst.flags.time_window) {
      s.elapsed_time = std::max(s.elapsed_time, inst.tw_early[c]) + inst.service_time[c];
    }
    const double demand = inst.demand[c];
    if (demand > 0.0) {
      s.remaining_capacity -= demand;
    } else {
      s.pickup_load -= demand;
      s.remaining_capacity = std::min(s.remaining_capacity, 1.0 - s.pickup_load);
      s.backhaul_in_route = true;
    }
    s.visited[c] = 1;
    ++s.num_visited;
    ++s.served_in_route;
    s.position = action;
  } else if (action == s.anchor) {
    if (!inst.flags.open) {
      const double leg = inst.distance(s.position, action);
      s.cost += leg;
      s.route_length += leg;
      s.elapsed_time += leg;
    }
    s.position = action;
    s.phase = s.num_visited == inst.num_customers() ? Phase::kDone : Phase::kAwaitingAnchor;
  } else {
    const double leg = inst.distance(s.position, action);
    s.cost += leg;
    s.route_length += leg;
    s.elapsed_time += leg;
    s.remaining_capacity = 1.0;
    s.pickup_load = 0.0;
    s.position = action;
  }
  s.actions.push_back(action);
  ++s.step;
}

void StepInPlace(const Instance& instance, RolloutState& state, int action,
                 const EnvOptions& options) {
  if (action < 0 || action >= instance.num_nodes()) {
    throw std::invalid_argument("Step: node index out of range: " + std::to_string(action));
  }
  const std::vector<std::uint8_t> mask = FeasibleActions(instance, state, options);
  if (!mask[action]) {
    throw std::invalid_argument("Step: infeasible action " + std::to_string(action) + " at step " +
                                std::to_string(state.step));
  }
  ApplyUnchecked(instance, state, action);
}

RolloutState Step(const Instance& instance, const RolloutState& state, int action,
                  const EnvOptions& options) {
  RolloutState next = state;
  StepInPlace(instance, next, action, options);
  return next;
}

double Reward(const Instance& instance, const Trajectory& trajectory, const EnvOptions& options) {
  RolloutState s = InitialState(instance);
  for (int action : trajectory.actions) {
    if (s.done()) throw std::invalid_argument("Reward: actions continue after completion");
    StepInPlace(instance, s, action, options);
  }
  if (!s.done()) throw std::invalid_argument("Reward: trajectory is incomplete");
  return -s.cost;
}

Trajectory ToTrajectory(const RolloutState& state) {
  Trajectory t;
  t.actions = state.actions;
  t.cost = state.cost;
  t.forced_prefix = state.forced_prefix;
  return t;
}

}  // namespace mdvrp
