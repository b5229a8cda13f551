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

#include <gtest/gtest.h>

#include <cmath>

#include "support/builders.h"

namespace mdvrp {
namespace {

using testing::Flags;
using testing::MakeInstance;

Solution Sol(std::vector<int> actions) { return Solution{std::move(actions), NAN}; }

TEST(CheckFeasibleTest, MinimalClosedTour) {
  const Instance inst = MakeInstance({{0, 0}}, {{0.3, 0.4}}, {5});
  const FeasibilityVerdict v = CheckFeasible(inst, Sol({0, 1, 0}));
  EXPECT_TRUE(v.ok) << v.message;
  EXPECT_DOUBLE_EQ(v.cost, 1.0);
}

TEST(CheckFeasibleTest, DemandAboveCapacity) {
  const Instance inst = MakeInstance({{0, 0}}, {{0.3, 0.4}}, {9}, Flags("MDVRP"), 8.0);
  const FeasibilityVerdict v = CheckFeasible(inst, Sol({0, 1, 0}));
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.route, 0);
  EXPECT_EQ(v.step, 1);
  EXPECT_NE(v.message.find("capacity"), std::string::npos);
}

TEST(CheckFeasibleTest, OpenRouteDropsReturnLeg) {
  const Instance inst = MakeInstance({{0, 0}}, {{0.3, 0.4}}, {5}, Flags("MDOVRP"));
  const FeasibilityVerdict v = CheckFeasible(inst, Sol({0, 1, 0}));
  EXPECT_TRUE(v.ok);
  EXPECT_DOUBLE_EQ(v.cost, 0.5);
}

TEST(CheckFeasibleTest, Coverage) {
  const Instance inst = MakeInstance({{0, 0}}, {{0.1, 0}, {0.2, 0}}, {1, 1});
  EXPECT_FALSE(CheckFeasible(inst, Sol({0, 1, 0})).ok);
  EXPECT_FALSE(CheckFeasible(inst, Sol({0, 1, 2, 1, 0})).ok);
  EXPECT_TRUE(CheckFeasible(inst, Sol({0, 1, 2, 0})).ok);
  EXPECT_TRUE(CheckFeasible(inst, Sol({0, 2, 0, 0, 1, 0})).ok);
}

TEST(CheckFeasibleTest, Structure) {
  const Instance inst = MakeInstance({{0, 0}, {1, 1}}, {{0.1, 0}, {0.2, 0}}, {1, 1});
  EXPECT_FALSE(CheckFeasible(inst, Sol({2, 3, 0})).ok);     // starts at a customer
  EXPECT_FALSE(CheckFeasible(inst, Sol({0, 2, 3})).ok);     // not closed
  EXPECT_FALSE(CheckFeasible(inst, Sol({0, 0, 0, 2, 3, 0})).ok);  // empty route
  EXPECT_FALSE(CheckFeasible(inst, Sol({0, 2, 1, 3, 0})).ok);  // reload without I
  EXPECT_THROW(CheckFeasible(inst, Sol({0, 7, 0})), std::out_of_range);
  EXPECT_THROW(CheckFeasible(inst, Sol({})), std::invalid_argument);
}

TEST(CheckFeasibleTest, InterDepotReloadResetsCapacity) {
  const std::vector<Point> depots = {{0, 0}, {0.5, 0}};
  const std::vector<Point> customers = {{0.25, 0}, {0.75, 0}};
  const Instance plain = MakeInstance(depots, customers, {30, 30});
  EXPECT_FALSE(CheckFeasible(plain, Sol({0, 2, 3, 0})).ok);
  const Instance inter = MakeInstance(depots, customers, {30, 30}, Flags("MDVRPI"));
  EXPECT_FALSE(CheckFeasible(inter, Sol({0, 2, 3, 0})).ok);
  const FeasibilityVerdict v = CheckFeasible(inter, Sol({0, 2, 1, 3, 0}));
  EXPECT_TRUE(v.ok) << v.message;
  EXPECT_DOUBLE_EQ(v.cost, 0.25 + 0.25 + 0.25 + 0.75);
  EXPECT_FALSE(CheckFeasible(inter, Sol({0, 2, 1, 0, 0, 3, 0})).ok);  // reload then close
  EXPECT_FALSE(CheckFeasible(inter, Sol({0, 1, 2, 3, 0})).ok);        // depot-to-depot
}

TEST(CheckFeasibleTest, RouteLimit) {
  Instance inst = MakeInstance({{0, 0}}, {{0.3, 0.4}}, {1}, Flags("MDVRPL"));
  inst.route_limit = 0.99;
  EXPECT_FALSE(CheckFeasible(inst, Sol({0, 1, 0})).ok);
  inst.route_limit = 1.0;
  EXPECT_TRUE(CheckFeasible(inst, Sol({0, 1, 0})).ok);
  Instance open = MakeInstance({{0, 0}}, {{0.3, 0.4}}, {1}, Flags("MDOVRPL"));
  open.route_limit = 0.5;
  EXPECT_TRUE(CheckFeasible(open, Sol({0, 1, 0})).ok);
}

TEST(CheckFeasibleTest, TimeWindows) {
  Instance inst = MakeInstance({{0, 0}}, {{0.3, 0.4}, {0.6, 0.8}}, {1, 1}, Flags("MDVRPTW"));
  inst.tw_late[0] = 0.4;
  const FeasibilityVerdict late = CheckFeasible(inst, Sol({0, 1, 0, 0, 2, 0}));
  EXPECT_FALSE(late.ok);
  EXPECT_EQ(late.route, 0);
  EXPECT_EQ(late.step, 1);
  EXPECT_FALSE(CheckFeasible(inst, Sol({0, 2, 1, 0})).ok);
  inst.tw_late[0] = 0.5;
  EXPECT_TRUE(CheckFeasible(inst, Sol({0, 1, 0, 0, 2, 0})).ok);
  // Waiting: service at customer 0 starts at 4.0 and the vehicle is back at 4.7.
  inst.tw_late[0] = 4.2;
  inst.tw_early[0] = 4.0;
  EXPECT_FALSE(CheckFeasible(inst, Sol({0, 1, 0, 0, 2, 0})).ok);
  Instance open = inst;
  open.flags = Flags("MDOVRPTW");
  EXPECT_TRUE(CheckFeasible(open, Sol({0, 1, 0, 0, 2, 0})).ok);
}

TEST(CheckFeasibleTest, BackhaulLoad) {
  // Mixed: deliver 30, then pick up 35. Peak on board is 35 after the pickup.
  const std::vector<Point> depots = {{0, 0}};
  const std::vector<Point> customers = {{0.1, 0}, {0.2, 0}, {0.3, 0}};
  const Instance mixed = MakeInstance(depots, customers, {30, -35, -10}, Flags("MDVRPB"));
  EXPECT_TRUE(CheckFeasible(mixed, Sol({0, 1, 2, 0, 0, 3, 0})).ok);
  // Pickup before delivery: 30 delivered cargo plus 35 picked up exceeds 40.
  EXPECT_FALSE(CheckFeasible(mixed, Sol({0, 2, 1, 0, 0, 3, 0})).ok);
  EXPECT_FALSE(CheckFeasible(mixed, Sol({0, 2, 3, 0, 0, 1, 0})).ok);
  const Instance strict = MakeInstance(depots, customers, {5, -5, 5}, ParseVariant("MDVRPB", BackhaulMode::kStrict));
  EXPECT_TRUE(CheckFeasible(strict, Sol({0, 1, 3, 2, 0})).ok);
  const FeasibilityVerdict v = CheckFeasible(strict, Sol({0, 1, 2, 3, 0}));
  EXPECT_FALSE(v.ok);
  EXPECT_EQ(v.step, 3);
}

TEST(CheckFeasibleTest, StatedCostMustMatch) {
  const Instance inst = MakeInstance({{0, 0}}, {{0.3, 0.4}}, {5});
  EXPECT_TRUE(CheckFeasible(inst, Solution{{0, 1, 0}, 1.0}).ok);
  EXPECT_FALSE(CheckFeasible(inst, Solution{{0, 1, 0}, 1.1}).ok);
}

}  // namespace
}  // namespace mdvrp
