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

#include "mdvrp/feasibility.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdvrp {

namespace {

struct Route {
  int anchor = -1;
  int start_step = 0;          // index of the opening anchor in the action list
  std::vector<int> nodes;      // customers and reload depots, in order
  bool closed = false;
};

FeasibilityVerdict Violation(std::string message, int route, int step) {
  FeasibilityVerdict verdict;
  verdict.ok = false;
  verdict.message = std::move(message);
  verdict.route = route;
  verdict.step = step;
  return verdict;
}

double Leg(const Instance& inst, int a, int b) {
  auto at = [&](int k) {
    return k < inst.num_depots() ? inst.depots[k] : inst.customers[k - inst.num_depots()];
  };
  const Point p = at(a);
  const Point q = at(b);
  return std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y));
}

}  // namespace

FeasibilityVerdict CheckFeasible(const Instance& inst, const Solution& solution) {
  const std::vector<int>& actions = solution.actions;
  if (actions.empty()) throw std::invalid_argument("CheckFeasible: empty action list");
  const int m = inst.num_depots();
  const int n = inst.num_customers();
  for (int a : actions) {
    if (a < 0 || a >= m + n) throw std::out_of_range("CheckFeasible: node index " + std::to_string(a));
  }
  const VariantFlags& flags = inst.flags;

  // Split the action list into routes.
  std::vector<Route> routes;
  for (int i = 0; i < static_cast<int>(actions.size());) {
    const int r = static_cast<int>(routes.size());
    if (actions[i] >= m) return Violation("route must begin at a depot", r, i);
    Route route;
    route.anchor = actions[i];
    route.start_step = i;
    ++i;
    while (i < static_cast<int>(actions.size())) {
      const int a = actions[i];
      ++i;
      if (a == route.anchor) {
        route.closed = true;
        break;
      }
      route.nodes.push_back(a);
    }
    if (!route.closed) return Violation("route is not closed by its anchor depot", r, i - 1);
    routes.push_back(std::move(route));
  }

  std::vector<int> visits(n, 0);
  double total = 0.0;
  for (int r = 0; r < static_cast<int>(routes.size()); ++r) {
    const Route& route = routes[r];
    const int base = route.start_step + 1;
    const int len = static_cast<int>(route.nodes.size());

    // Structure: no depot-to-depot edges and reloads only under I.
    if (len == 0) return Violation("depot-to-depot move (empty route)", r, base);
    for (int k = 0; k < len; ++k) {
      const int node = route.nodes[k];
      if (node >= m) continue;
      if (!flags.inter_depot) return Violation("intermediate depot visit without inter-depot routes", r, base + k);
      if (k == 0 || route.nodes[k - 1] < m) return Violation("depot-to-depot move", r, base + k);
      if (k == len - 1) return Violation("depot-to-depot move", r, base + k + 1);
    }

    // Coverage.
    for (int k = 0; k < len; ++k) {
      const int node = route.nodes[k];
      if (node < m) continue;
      if (++visits[node - m] > 1) {
        return Violation("customer " + std::to_string(node) + " visited more than once", r, base + k);
      }
    }

    // Capacity: each reload-delimited segment departs carrying exactly the
    // linehaul it will deliver; the on-board load may never exceed 1.
    for (int seg_begin = 0; seg_begin < len;) {
      int seg_end = seg_begin;
      while (seg_end < len && route.nodes[seg_end] >= m) ++seg_end;
      double linehaul = 0.0;
      for (int k = seg_begin; k < seg_end; ++k) {
        const double d = inst.demand[route.nodes[k] - m];
        if (d > 0.0) {
          linehaul += d;
          if (linehaul > 1.0 + kFeasibilityEps) return Violation("capacity exceeded", r, base + k);
        }
      }
      double load = linehaul;
      for (int k = seg_begin; k < seg_end; ++k) {
        const double d = inst.demand[route.nodes[k] - m];
        load -= d;  // delivery lowers the load, pickup (negative demand) raises it
        if (load > 1.0 + kFeasibilityEps) return Violation("capacity exceeded by pickup", r, base + k);
      }
      seg_begin = seg_end + 1;
    }

    // Strict backhauls: no delivery after the first pickup of the route.
    if (flags.backhaul && flags.backhaul_mode == BackhaulMode::kStrict) {
      bool picked = false;
      for (int k = 0; k < len; ++k) {
        const int node = route.nodes[k];
        if (node < m) continue;
        const bool pickup = inst.demand[node - m] < 0.0;
        if (picked && !pickup) return Violation("linehaul after backhaul in strict mode", r, base + k);
        picked = picked || pickup;
      }
    }

    // Distance, route length and time.
    double length = 0.0;
    double clock = 0.0;
    int prev = route.anchor;
    for (int k = 0; k < len; ++k) {
      const int node = route.nodes[k];
      const double leg = Leg(inst, prev, node);
      length += leg;
      clock += leg;
      if (node >= m && flags.time_window) {
        const int c = node - m;
        if (clock > inst.tw_late[c] + kFeasibilityEps) {
          return Violation("arrival after time window closes", r, base + k);
        }
        clock = std::max(clock, inst.tw_early[c]) + inst.service_time[c];
      }
      if (node < m && flags.time_window && clock > inst.depot_close + kFeasibilityEps) {
        return Violation("reload depot reached after closing time", r, base + k);
      }
      prev = node;
    }
    const double back = Leg(inst, prev, route.anchor);
    if (!flags.open) {
      length += back;
      clock += back;
      if (flags.time_window && clock > inst.depot_close + kFeasibilityEps) {
        return Violation("return to depot after closing time", r, base + len);
      }
    }
    if (flags.limit && length > inst.route_limit + kFeasibilityEps) {
      return Violation("route length limit exceeded", r, base + len);
    }
    total += length;
  }

  for (int c = 0; c < n; ++c) {
    if (visits[c] != 1) {
      return Violation("customer " + std::to_string(c + m) + " not served", -1, -1);
    }
  }

  FeasibilityVerdict verdict;
  verdict.cost = total;
  if (!std::isnan(solution.cost) &&
      std::abs(solution.cost - total) > 1e-9 * std::max(1.0, std::abs(total))) {
    verdict.ok = false;
    verdict.message = "stated cost " + FormatDouble(solution.cost) + " differs from recomputed " +
                      FormatDouble(total);
  }
  return verdict;
}

}  // namespace mdvrp
