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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdvrp/env.h"
#include "mdvrp/feasibility.h"
#include "mdvrp/oracle.h"
#include "support/builders.h"

namespace mdvrp {
namespace {

using testing::Flags;
using testing::MakeInstance;

double FarthestPair(const Instance& inst) {
  double best = 0.0;
  for (const Point& d : inst.depots) {
    for (const Point& c : inst.customers) {
      best = std::max(best, std::sqrt((d.x - c.x) * (d.x - c.x) + (d.y - c.y) * (d.y - c.y)));
    }
  }
  return best;
}

TEST(CapacityTest, InterpolatesAndClamps) {
  EXPECT_EQ(CapacityFor(50), 40.0);
  EXPECT_EQ(CapacityFor(100), 50.0);
  EXPECT_EQ(CapacityFor(75), 45.0);
  EXPECT_EQ(CapacityFor(8), 40.0);
  EXPECT_EQ(CapacityFor(1), 40.0);
  EXPECT_EQ(CapacityFor(400), 50.0);
}

TEST(GenerateTest, FiftyCustomersWithBackhauls) {
  const Instance inst = GenerateInstance(50, 3, Flags("MDVRPB"), 7);
  EXPECT_EQ(inst.capacity, 40.0);
  EXPECT_EQ(std::count_if(inst.demand.begin(), inst.demand.end(), [](double d) { return d < 0; }), 10);
  EXPECT_EQ(ValidateInstance(inst), std::nullopt);
}

TEST(GenerateTest, SingleCustomer) {
  const Instance inst = GenerateInstance(1, 1, Flags("MDVRP"), 0);
  EXPECT_EQ(inst.num_customers(), 1);
  EXPECT_EQ(inst.num_depots(), 1);
  EXPECT_GT(inst.demand[0], 0.0);
  EXPECT_EQ(ValidateInstance(inst), std::nullopt);
}

TEST(GenerateTest, RouteLimitRange) {
  const Instance inst = GenerateInstance(5, 2, Flags("MDVRPL"), 42);
  const double lower = 2.0 * FarthestPair(inst);
  EXPECT_GE(inst.route_limit, lower);
  EXPECT_LE(inst.route_limit, std::max(3.0, lower));
}

TEST(GenerateTest, Deterministic) {
  for (const VariantFlags& f : AllVariants()) {
    EXPECT_EQ(GenerateInstance(6, 2, f, 99), GenerateInstance(6, 2, f, 99));
  }
  EXPECT_NE(GenerateInstance(6, 2, Flags("MDVRP"), 1), GenerateInstance(6, 2, Flags("MDVRP"), 2));
}

TEST(GenerateTest, RejectsBadArguments) {
  EXPECT_THROW(GenerateInstance(0, 1, Flags("MDVRP"), 1), std::invalid_argument);
  EXPECT_THROW(GenerateInstance(3, 0, Flags("MDVRP"), 1), std::invalid_argument);
  VariantFlags bad;
  bad.open = true;
  bad.inter_depot = true;
  EXPECT_THROW(GenerateInstance(3, 1, bad, 1), std::invalid_argument);
}

TEST(GenerateTest, InvariantsHoldForManySamples) {
  int samples = 0;
  for (const VariantFlags& f : AllVariants()) {
    for (std::uint64_t seed = 0; seed < 45; ++seed) {
      const int n = 1 + static_cast<int>(seed % 12);
      const int m = 1 + static_cast<int>(seed % 3);
      const Instance inst = GenerateInstance(n, m, f, seed);
      ASSERT_EQ(ValidateInstance(inst), std::nullopt) << f.Name() << " seed " << seed;
      ++samples;
    }
  }
  EXPECT_GE(samples, 1000);
}

TEST(GenerateTest, EveryCustomerReachableAlone) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance inst = GenerateInstance(8, 3, Flags("MDVRPLTW"), seed);
    for (int j = 0; j < inst.num_depots(); ++j) {
      for (int c = 0; c < inst.num_customers(); ++c) {
        const double d = Distance(inst.depots[j], inst.customers[c]);
        ASSERT_LE(d, inst.tw_late[c] + kFeasibilityEps);
        ASSERT_LE(std::max(d, inst.tw_early[c]) + inst.service_time[c] + d, inst.depot_close + kFeasibilityEps);
        ASSERT_LE(2 * d, inst.route_limit + kFeasibilityEps);
      }
    }
  }
}

TEST(GenerateTest, DemandNormalization) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance inst = GenerateInstance(10, 2, Flags("MDVRPB"), seed);
    double raw_sum = 0.0;
    double norm_sum = 0.0;
    for (double d : inst.demand) {
      const double raw = std::abs(d) * inst.capacity;
      const double rounded = std::round(raw);
      ASSERT_NEAR(raw, rounded, 1e-12);
      ASSERT_GE(rounded, 1.0);
      ASSERT_LE(rounded, 9.0);
      raw_sum += rounded;
      norm_sum += std::abs(d);
    }
    EXPECT_NEAR(raw_sum, inst.capacity * norm_sum, 1e-9);
  }
}

TEST(RouteLimitTest, ThreeFourFiveTriangle) {
  const std::vector<Point> depots = {{0, 0}};
  const std::vector<Point> customers = {{0.6, 0.8}};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const double d = SampleRouteLimit(depots, customers, rng);
    EXPECT_GE(d, 2.0);
    EXPECT_LE(d, 3.0);
  }
}

TEST(RouteLimitTest, CoincidentPoints) {
  const std::vector<Point> pts = {{0.4, 0.4}};
  double lo = 3.0;
  double hi = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const double d = SampleRouteLimit(pts, pts, rng);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 3.0);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  EXPECT_LT(lo, 0.5);
  EXPECT_GT(hi, 2.5);
}

TEST(RouteLimitTest, BoundsMatchPairScan) {
  Rng coords(21);
  std::vector<Point> depots(3);
  std::vector<Point> customers(4);
  for (Point& p : depots) p = {coords.Uniform(), coords.Uniform()};
  for (Point& p : customers) p = {coords.Uniform(), coords.Uniform()};
  double farthest = 0.0;
  for (const Point& a : depots) {
    for (const Point& b : customers) farthest = std::max(farthest, std::hypot(a.x - b.x, a.y - b.y));
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const double d = SampleRouteLimit(depots, customers, rng);
    EXPECT_GE(d, 2 * farthest);
    EXPECT_LE(d, std::max(3.0, 2 * farthest));
  }
}

TEST(RouteLimitTest, CollapsesWhenTwiceFarthestExceedsCap) {
  const std::vector<Point> depots = {{0, 0}};
  // Unreachable inside the unit square, so use a point outside it.
  Rng rng(1);
  EXPECT_EQ(SampleRouteLimit(depots, std::vector<Point>{{2, 0}}, rng), 4.0);
  EXPECT_EQ(SampleRouteLimit(depots, std::vector<Point>{{1.5, 0}}, rng), 3.0);
}

TEST(AugmentTest, IdentityAndReflection) {
  const Instance inst = GenerateInstance(6, 2, Flags("MDVRPTW"), 3);
  EXPECT_EQ(Augment(inst, 0), inst);
  const Point p = DihedralMap({0.2, 0.7}, 4);
  EXPECT_DOUBLE_EQ(p.x, 0.8);
  EXPECT_DOUBLE_EQ(p.y, 0.7);
  EXPECT_THROW(Augment(inst, 8), std::out_of_range);
  EXPECT_THROW(Augment(inst, -1), std::out_of_range);
}

TEST(AugmentTest, OnlyCoordinatesChange) {
  const Instance inst = GenerateInstance(6, 2, Flags("MDVRPBLTW"), 3);
  for (int k = 0; k < 8; ++k) {
    Instance a = Augment(inst, k);
    a.depots = inst.depots;
    a.customers = inst.customers;
    EXPECT_EQ(a, inst);
  }
}

TEST(AugmentTest, InverseAndIsometry) {
  const Instance inst = GenerateInstance(7, 3, Flags("MDVRP"), 12);
  for (int k = 0; k < 8; ++k) {
    const Instance back = Augment(Augment(inst, k), InverseDihedral(k));
    for (int i = 0; i < inst.num_nodes(); ++i) {
      EXPECT_NEAR(back.node(i).x, inst.node(i).x, 1e-12);
      EXPECT_NEAR(back.node(i).y, inst.node(i).y, 1e-12);
    }
    const Instance a = Augment(inst, k);
    for (int i = 0; i < inst.num_nodes(); ++i) {
      for (int j = 0; j < inst.num_nodes(); ++j) EXPECT_NEAR(a.distance(i, j), inst.distance(i, j), 1e-12);
    }
  }
}

TEST(AugmentTest, SolutionCostInvariant) {
  const Instance inst = GenerateInstance(8, 2, Flags("MDVRPL"), 17);
  const Solution sol = GreedySolve(inst);
  const double base = CheckFeasible(inst, {sol.actions, NAN}).cost;
  for (int k = 0; k < 8; ++k) {
    const Instance a = Augment(inst, k);
    Trajectory t;
    t.actions = sol.actions;
    EXPECT_NEAR(-Reward(a, t), base, 1e-12) << "map " << k;
    const FeasibilityVerdict v = CheckFeasible(a, {sol.actions, NAN});
    EXPECT_TRUE(v.ok) << v.message;
    EXPECT_NEAR(v.cost, base, 1e-12);
  }
}

TEST(ValidateTest, NamesTheViolatedProperty) {
  Instance inst = GenerateInstance(5, 2, Flags("MDVRPTW"), 1);
  inst.customers[2].x = 1.5;
  const auto bad = ValidateInstance(inst);
  ASSERT_TRUE(bad.has_value());
  EXPECT_EQ(bad->rfind("coordinates:", 0), 0u) << *bad;

  inst = GenerateInstance(5, 2, Flags("MDVRPTW"), 1);
  inst.tw_early[0] = inst.tw_late[0] + 1;
  ASSERT_TRUE(ValidateInstance(inst).has_value());
  EXPECT_EQ(ValidateInstance(inst)->rfind("time_window:", 0), 0u);

  inst = GenerateInstance(5, 2, Flags("MDVRP"), 1);
  inst.demand[0] = -inst.demand[0];
  ASSERT_TRUE(ValidateInstance(inst).has_value());
  EXPECT_EQ(ValidateInstance(inst)->rfind("demand:", 0), 0u);
}

TEST(InstanceIoTest, RoundTripEquality) {
  for (const VariantFlags& f : AllVariants()) {
    const Instance inst = GenerateInstance(9, 3, f, 31);
    EXPECT_EQ(ReadInstanceFromString(WriteInstanceToString(inst)), inst) << f.Name();
  }
  const Instance strict = GenerateInstance(9, 3, ParseVariant("MDVRPB", BackhaulMode::kStrict), 5);
  EXPECT_EQ(ReadInstanceFromString(WriteInstanceToString(strict)), strict);
}

TEST(InstanceIoTest, WriteReadWriteIdempotent) {
  Rng rng(77);
  for (int i = 0; i < 100; ++i) {
    const VariantFlags& f = AllVariants()[i % kNumVariants];
    const Instance inst = GenerateInstance(1 + static_cast<int>(rng.Below(20)), 1 + static_cast<int>(rng.Below(4)),
                                           f, rng.Next());
    const std::string first = WriteInstanceToString(inst);
    EXPECT_EQ(WriteInstanceToString(ReadInstanceFromString(first)), first);
  }
}

TEST(InstanceIoTest, MissingCapacityIsNamed) {
  const std::string text = WriteInstanceToString(GenerateInstance(4, 2, Flags("MDVRP"), 1));
  std::istringstream in(text);
  std::string out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("capacity ", 0) == 0) continue;
    out += line + "\n";
  }
  try {
    ReadInstanceFromString(out);
    FAIL() << "parse succeeded";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "capacity");
    EXPECT_GT(e.line(), 0);
  }
}

TEST(InstanceIoTest, MalformedNumberReportsLine) {
  std::string text = WriteInstanceToString(GenerateInstance(4, 2, Flags("MDVRP"), 1));
  const auto pos = text.find("capacity ");
  text.replace(pos, text.find('\n', pos) - pos, "capacity forty");
  try {
    ReadInstanceFromString(text);
    FAIL() << "parse succeeded";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "capacity");
    EXPECT_EQ(e.line(), 6);
  }
  EXPECT_THROW(ReadInstanceFromString("not an instance\n"), ParseError);
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.Uniform() * std::pow(10.0, static_cast<int>(rng.Below(20)) - 10);
    EXPECT_EQ(ParseDouble(FormatDouble(v)), v);
  }
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_THROW(ParseDouble("1.5x"), std::invalid_argument);
}

}  // namespace
}  // namespace mdvrp
