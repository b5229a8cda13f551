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

#include "mdvrp/instance.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mdvrp {

double Distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double CapacityFor(int num_customers) {
  const double interpolated = 40.0 + (num_customers - 50) * (10.0 / 50.0);
  return std::clamp(std::round(interpolated), 40.0, 50.0);
}

double SampleRouteLimit(std::span<const Point> depots, std::span<const Point> customers, Rng& rng) {
  double farthest = 0.0;
  for (const Point& d : depots) {
    for (const Point& c : customers) farthest = std::max(farthest, Distance(d, c));
  }
  const double lower = 2.0 * farthest;
  if (lower >= kRouteLimitCap) return lower;
  return rng.Uniform(lower, kRouteLimitCap);
}

Instance GenerateInstance(int num_customers, int num_depots, const VariantFlags& flags,
                          std::uint64_t seed) {
  if (num_customers <= 0) throw std::invalid_argument("GenerateInstance: n must be >= 1");
  if (num_depots <= 0) throw std::invalid_argument("GenerateInstance: m must be >= 1");
  if (!flags.Valid()) {
    throw std::invalid_argument(
        "GenerateInstance: open routes and inter-depot routes are mutually exclusive");
  }

  // Draw order is part of the file-level contract: depots, customers,
  // demands, backhaul designation, route limit, time windows. Coordinates and
  // raw demands therefore do not depend on the flags.
  Rng rng = Rng::Derive(seed, {static_cast<std::uint64_t>(num_customers),
                               static_cast<std::uint64_t>(num_depots)});
  Instance inst;
  inst.flags = flags;
  inst.seed = seed;
  inst.capacity = CapacityFor(num_customers);

  inst.depots.resize(num_depots);
  for (Point& p : inst.depots) {
    p.x = rng.Uniform();
    p.y = rng.Uniform();
  }
  inst.customers.resize(num_customers);
  for (Point& p : inst.customers) {
    p.x = rng.Uniform();
    p.y = rng.Uniform();
  }
  std::vector<int> raw(num_customers);
  for (int& r : raw) r = static_cast<int>(rng.Between(1, kMaxRawDemand));

  std::vector<bool> is_backhaul(num_customers, false);
  if (flags.backhaul) {
    const int count = (num_customers + 4) / 5;  // ceil(0.2 n)
    std::vector<int> order(num_customers);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < count; ++i) {
      const auto j = i + static_cast<int>(rng.Below(num_customers - i));
      std::swap(order[i], order[j]);
      is_backhaul[order[i]] = true;
    }
  }
  inst.demand.resize(num_customers);
  for (int i = 0; i < num_customers; ++i) {
    const double normalized = raw[i] / inst.capacity;
    inst.demand[i] = is_backhaul[i] ? -normalized : normalized;
  }

  if (flags.limit) inst.route_limit = SampleRouteLimit(inst.depots, inst.customers, rng);

  if (flags.time_window) {
    inst.depot_close = kHorizon;
    inst.tw_early.resize(num_customers);
    inst.tw_late.resize(num_customers);
    inst.service_time.assign(num_customers, kServiceTime);
    const double latest_start = kHorizon - kServiceTime;
    for (int i = 0; i < num_customers; ++i) {
      // Centering on the farthest depot keeps every customer servable on a
      // single-customer route from any depot, including POMO forced starts.
      double reach = 0.0;
      for (const Point& d : inst.depots) reach = std::max(reach, Distance(d, inst.customers[i]));
      const double center = rng.Uniform(reach, latest_start - reach);
      const double half_width = rng.Uniform(kHalfWidthMin, kHalfWidthMax);
      inst.tw_early[i] = std::max(0.0, center - half_width);
      inst.tw_late[i] = std::min(latest_start, center + half_width);
    }
  }
  return inst;
}

Point DihedralMap(Point p, int k) {
  const double x = p.x;
  const double y = p.y;
  switch (k) {
    case 0: return {x, y};
    case 1: return {y, x};
    case 2: return {x, 1.0 - y};
    case 3: return {y, 1.0 - x};
    case 4: return {1.0 - x, y};
    case 5: return {1.0 - y, x};
    case 6: return {1.0 - x, 1.0 - y};
    case 7: return {1.0 - y, 1.0 - x};
    default: throw std::out_of_range("dihedral index must be in [0, 8)");
  }
}

int InverseDihedral(int k) {
  if (k < 0 || k >= 8) throw std::out_of_range("dihedral index must be in [0, 8)");
  // Rotations by +-90 degrees swap; every other map is an involution.
  if (k == 3) return 5;
  if (k == 5) return 3;
  return k;
}

Instance Augment(const Instance& instance, int k) {
  if (k < 0 || k >= 8) throw std::out_of_range("Augment: k must be in [0, 8)");
  Instance out = instance;
  for (Point& p : out.depots) p = DihedralMap(p, k);
  for (Point& p : out.customers) p = DihedralMap(p, k);
  return out;
}

std::optional<std::string> ValidateInstance(const Instance& inst, bool expect_generated) {
  auto fail = [](const std::string& what) { return std::optional<std::string>(what); };
  const int n = inst.num_customers();
  const int m = inst.num_depots();
  if (m < 1) return fail("depot_count: at least one depot required");
  if (n < 1) return fail("customer_count: at least one customer required");
  if (!inst.flags.Valid()) return fail("flags: open and inter_depot are mutually exclusive");
  auto in_square = [](Point p) {
    return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
  };
  for (int j = 0; j < m; ++j) {
    if (!in_square(inst.depots[j])) return fail("coordinates: depot " + std::to_string(j) + " outside [0,1]^2");
  }
  for (int i = 0; i < n; ++i) {
    if (!in_square(inst.customers[i])) {
      return fail("coordinates: customer " + std::to_string(i) + " outside [0,1]^2");
    }
  }
  if (!(inst.capacity > 0.0)) return fail("capacity: must be positive");
  if (static_cast<int>(inst.demand.size()) != n) return fail("demand: length differs from customer count");
  const double max_demand = kMaxRawDemand / inst.capacity + kFeasibilityEps;
  int backhauls = 0;
  for (int i = 0; i < n; ++i) {
    const double d = inst.demand[i];
    if (d < 0.0) {
      ++backhauls;
      if (!inst.flags.backhaul) return fail("demand: customer " + std::to_string(i) + " negative without backhaul flag");
      if (-d > max_demand) return fail("demand: backhaul customer " + std::to_string(i) + " exceeds 9/C");
    } else if (!(d > 0.0) || d > max_demand) {
      return fail("demand: customer " + std::to_string(i) + " outside (0, 9/C]");
    }
  }
  if (expect_generated && inst.flags.backhaul && backhauls != (n + 4) / 5) {
    return fail("backhaul_count: expected ceil(0.2 n) backhaul customers");
  }
  if (inst.flags.limit) {
    if (!(inst.route_limit > 0.0)) return fail("route_limit: must be positive");
    if (expect_generated) {
      double farthest = 0.0;
      for (const Point& d : inst.depots) {
        for (const Point& c : inst.customers) farthest = std::max(farthest, Distance(d, c));
      }
      if (inst.route_limit < 2.0 * farthest) return fail("route_limit: below twice the farthest depot-customer distance");
      if (inst.route_limit > std::max(kRouteLimitCap, 2.0 * farthest)) return fail("route_limit: above 3.0");
    }
  }
  if (inst.flags.time_window) {
    if (static_cast<int>(inst.tw_early.size()) != n || static_cast<int>(inst.tw_late.size()) != n ||
        static_cast<int>(inst.service_time.size()) != n) {
      return fail("time_window: field lengths differ from customer count");
    }
    if (!(inst.depot_close > 0.0)) return fail("depot_close: must be positive");
    for (int i = 0; i < n; ++i) {
      if (!(inst.tw_early[i] >= 0.0) || !(inst.tw_early[i] <= inst.tw_late[i])) {
        return fail("time_window: customer " + std::to_string(i) + " has tw_early > tw_late");
      }
      if (!(inst.service_time[i] >= 0.0)) return fail("service_time: customer " + std::to_string(i) + " negative");
    }
  } else if (!inst.tw_early.empty() || !inst.tw_late.empty() || !inst.service_time.empty()) {
    return fail("time_window: fields present without time_window flag");
  }
  return std::nullopt;
}

}  // namespace mdvrp
