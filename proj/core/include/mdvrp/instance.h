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

#ifndef MDVRP_INSTANCE_H_
#define MDVRP_INSTANCE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdvrp/rng.h"
#include "mdvrp/variants.h"

namespace mdvrp {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

double Distance(Point a, Point b);

// Time-window generation constants. Travel time equals Euclidean distance.
inline constexpr double kHorizon = 4.6;
inline constexpr double kServiceTime = 0.2;
inline constexpr double kHalfWidthMin = 0.15;
inline constexpr double kHalfWidthMax = 0.9;
inline constexpr double kRouteLimitCap = 3.0;
inline constexpr double kBackhaulShare = 0.2;
inline constexpr int kMaxRawDemand = 9;

// Tolerance used by every capacity, length and time comparison.
inline constexpr double kFeasibilityEps = 1e-9;

// Immutable problem description. Nodes are indexed depots first
// (0..m-1) then customers (m..m+n-1); customer vectors are indexed 0..n-1.
// Demands are normalized by the capacity, so a vehicle always holds 1.0;
// backhaul (pickup) customers carry negative demand.
struct Instance {
  std::vector<Point> depots;
  std::vector<Point> customers;
  std::vector<double> demand;
  double capacity = 0.0;
  double route_limit = 0.0;  // meaningful iff flags.limit
  std::vector<double> tw_early;
  std::vector<double> tw_late;
  std::vector<double> service_time;
  double depot_close = 0.0;  // meaningful iff flags.time_window
  VariantFlags flags;
  std::uint64_t seed = 0;

  int num_depots() const { return static_cast<int>(depots.size()); }
  int num_customers() const { return static_cast<int>(customers.size()); }
  int num_nodes() const { return num_depots() + num_customers(); }
  bool is_depot(int node) const { return node < num_depots(); }
  Point node(int index) const {
    return is_depot(index) ? depots[index] : customers[index - num_depots()];
  }
  double distance(int a, int b) const { return Distance(node(a), node(b)); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Vehicle capacity for an instance with n customers: 40 at n=50, 50 at
// n=100, linear in between, rounded and clamped to [40, 50].
double CapacityFor(int num_customers);

// Samples D uniformly on [2 d*, 3.0] where d* is the largest depot-customer
// distance. Collapses to 2 d* when 2 d* > 3.0.
double SampleRouteLimit(std::span<const Point> depots, std::span<const Point> customers, Rng& rng);

// Throws std::invalid_argument for n == 0, m == 0 or O combined with I.
Instance GenerateInstance(int num_customers, int num_depots, const VariantFlags& flags,
                          std::uint64_t seed);

// Dihedral symmetry k of the unit square, k in [0, 8):
// (x,y) (y,x) (x,1-y) (y,1-x) (1-x,y) (1-y,x) (1-x,1-y) (1-y,1-x).
Point DihedralMap(Point p, int k);
int InverseDihedral(int k);
Instance Augment(const Instance& instance, int k);

// First violated generator invariant, or nullopt when the instance satisfies
// all of them. `expect_generated` additionally checks properties that only
// hold for generator output (backhaul share, route-limit bound).
std::optional<std::string> ValidateInstance(const Instance& instance, bool expect_generated = true);

// Line-oriented instance file. Numbers are shortest round-trip decimals.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, std::string field, const std::string& what);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

void WriteInstance(const Instance& instance, std::ostream& out);
std::string WriteInstanceToString(const Instance& instance);
Instance ReadInstance(std::istream& in);
Instance ReadInstanceFromString(const std::string& text);
Instance ReadInstanceFile(const std::string& path);
void WriteInstanceFile(const Instance& instance, const std::string& path);

// Shortest decimal that parses back to the same double.
std::string FormatDouble(double value);
double ParseDouble(std::string_view text);

}  // namespace mdvrp

#endif  // MDVRP_INSTANCE_H_
