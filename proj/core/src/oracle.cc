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

#include "mdvrp/oracle.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mdvrp {

namespace {

class Search {
 public:
  Search(const Instance& inst, const OracleOptions& options)
      : inst_(inst), options_(options) {}

  void Run(RolloutState& state) {
    ++result_.nodes_expanded;
    if (state.done()) {
      if (state.cost < best_) {
        best_ = state.cost;
        result_.best = Solution{state.actions, state.cost};
      }
      return;
    }
    if (Bound(state) >= best_) return;
    std::vector<std::uint8_t> mask(inst_.num_nodes());
    FeasibleActionsInto(inst_, state, options_.env, mask);
    for (int a = 0; a < inst_.num_nodes(); ++a) {
      if (!mask[a]) continue;
      RolloutState next = state;
      ApplyUnchecked(inst_, next, a);
      Run(next);
    }
  }

  OracleResult Finish() {
    if (!std::isfinite(best_)) throw std::logic_error("exhaustive search found no complete solution");
    result_.cost = best_;
    return std::move(result_);
  }

 private:
  double Bound(const RolloutState& s) const {
    if (!options_.nearest_return_bound || inst_.flags.open || s.phase != Phase::kRouteActive) return s.cost;
    return s.cost + inst_.distance(s.position, s.anchor);
  }

  const Instance& inst_;
  const OracleOptions& options_;
  double best_ = std::numeric_limits<double>::infinity();
  OracleResult result_;
};

}  // namespace

OracleResult ExhaustiveSolve(const Instance& inst, const OracleOptions& options) {
  if (inst.num_customers() > kMaxExhaustiveCustomers) {
    throw std::invalid_argument("exhaustive search is limited to " + std::to_string(kMaxExhaustiveCustomers) +
                                " customers, instance has " + std::to_string(inst.num_customers()));
  }
  Search search(inst, options);
  RolloutState state = InitialState(inst);
  search.Run(state);
  return search.Finish();
}

Solution GreedySolve(const Instance& inst, const EnvOptions& env) {
  const int m = inst.num_depots();
  RolloutState s = InitialState(inst);
  std::vector<std::uint8_t> mask(inst.num_nodes());
  while (!s.done()) {
    FeasibleActionsInto(inst, s, env, mask);
    int choice = -1;
    if (s.phase == Phase::kAwaitingAnchor) {
      Point centroid;
      int unserved = 0;
      for (int c = 0; c < inst.num_customers(); ++c) {
        if (s.visited[c]) continue;
        centroid.x += inst.customers[c].x;
        centroid.y += inst.customers[c].y;
        ++unserved;
      }
      centroid.x /= unserved;
      centroid.y /= unserved;
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) {
        const double d = Distance(inst.depots[j], centroid);
        if (mask[j] && d < best) {
          best = d;
          choice = j;
        }
      }
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (int a = m; a < inst.num_nodes(); ++a) {
        const double d = inst.distance(s.position, a);
        if (mask[a] && d < best) {
          best = d;
          choice = a;
        }
      }
      if (choice < 0) choice = s.anchor;
    }
    if (choice < 0 || !mask[choice]) throw std::logic_error("greedy: no admissible action");
    ApplyUnchecked(inst, s, choice);
  }
  return Solution{s.actions, s.cost};
}

double Gap(double objective, double reference) {
  if (!(reference > 0.0)) throw std::invalid_argument("Gap: reference must be positive");
  return 100.0 * (objective - reference) / reference;
}

}  // namespace mdvrp
