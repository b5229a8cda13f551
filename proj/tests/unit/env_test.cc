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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

#include "mdvrp/feasibility.h"
#include "support/builders.h"

namespace mdvrp {
namespace {

using testing::Flags;
using testing::MakeInstance;
using testing::RandomWalk;

// Depth-first search for any completion of `s`, using the environment's own
// transitions. The result is audited separately.
std::optional<std::vector<int>> AnyCompletion(const Instance& inst, const RolloutState& s) {
  if (s.done()) return s.actions;
  const std::vector<std::uint8_t> mask = FeasibleActions(inst, s);
  for (int a = 0; a < static_cast<int>(mask.size()); ++a) {
    if (!mask[a]) continue;
    if (auto found = AnyCompletion(inst, Step(inst, s, a))) return found;
  }
  return std::nullopt;
}

// Whether some full solution starting with `prefix` (an open route without
// reloads) passes the checker. Enumerates every order of the remaining
// customers, every number of them kept on the open route, and every split
// of the rest into routes from every depot.
bool CompletableByChecker(const Instance& inst, const std::vector<int>& prefix, int anchor) {
  const int m = inst.num_depots();
  std::vector<int> rest;
  for (int c = 0; c < inst.num_customers(); ++c) {
    if (std::find(prefix.begin(), prefix.end(), m + c) == prefix.end()) rest.push_back(m + c);
  }
  std::sort(rest.begin(), rest.end());
  do {
    for (int keep = 0; keep <= static_cast<int>(rest.size()); ++keep) {
      std::vector<int> head = prefix;
      head.insert(head.end(), rest.begin(), rest.begin() + keep);
      head.push_back(anchor);
      const int tail = static_cast<int>(rest.size()) - keep;
      const int splits = tail == 0 ? 1 : 1 << (tail - 1);
      for (int mask = 0; mask < splits; ++mask) {
        std::vector<std::vector<int>> routes(1);
        for (int k = 0; k < tail; ++k) {
          if (k > 0 && (mask >> (k - 1) & 1)) routes.emplace_back();
          routes.back().push_back(rest[keep + k]);
        }
        if (tail == 0) routes.clear();
        int combos = 1;
        for (std::size_t r = 0; r < routes.size(); ++r) combos *= m;
        for (int combo = 0; combo < combos; ++combo) {
          std::vector<int> actions = head;
          int code = combo;
          for (const auto& route : routes) {
            const int depot = code % m;
            code /= m;
            actions.push_back(depot);
            actions.insert(actions.end(), route.begin(), route.end());
            actions.push_back(depot);
          }
          if (CheckFeasible(inst, Solution{actions, NAN}).ok) return true;
        }
      }
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  return false;
}

TEST(InitRolloutsTest, StartCounts) {
  const Instance big = GenerateInstance(50, 3, Flags("MDVRP"), 1);
  EXPECT_EQ(InitRollouts(big, StartMode::kTrain).size(), 52u);
  EXPECT_EQ(InitRollouts(big, StartMode::kInference).size(), 150u);
  const Instance one = GenerateInstance(1, 1, Flags("MDVRP"), 0);
  const auto states = InitRollouts(one, StartMode::kTrain);
  ASSERT_EQ(states.size(), 1u);
  EXPECT_EQ(states[0].anchor, 0);
  EXPECT_EQ(states[0].actions, (std::vector<int>{0, 1}));
  EXPECT_EQ(states[0].forced_prefix, 2);
}

TEST(InitRolloutsTest, TrainStartLayout) {
  const Instance inst = GenerateInstance(4, 3, Flags("MDVRPTW"), 2);
  const auto states = InitRollouts(inst, StartMode::kTrain);
  ASSERT_EQ(states.size(), 6u);
  EXPECT_EQ(states[0].actions, (std::vector<int>{1}));
  EXPECT_EQ(states[1].actions, (std::vector<int>{2}));
  for (int c = 0; c < 4; ++c) EXPECT_EQ(states[2 + c].actions, (std::vector<int>{0, 3 + c}));
  const auto full = InitRollouts(inst, StartMode::kInference);
  ASSERT_EQ(full.size(), 12u);
  EXPECT_EQ(full[5].actions, (std::vector<int>{1, 4}));
}

TEST(MaskTest, AwaitingAnchorAllowsOnlyDepots) {
  const Instance inst = GenerateInstance(5, 3, Flags("MDVRP"), 4);
  const auto mask = FeasibleActions(inst, InitialState(inst));
  for (int i = 0; i < inst.num_nodes(); ++i) EXPECT_EQ(mask[i], i < 3 ? 1 : 0);
}

TEST(MaskTest, FreshRouteUnconstrained) {
  const Instance inst = GenerateInstance(8, 2, Flags("MDVRP"), 4);
  const RolloutState s = Step(inst, InitialState(inst), 1);
  const auto mask = FeasibleActions(inst, s);
  for (int i = 0; i < 2; ++i) EXPECT_EQ(mask[i], 0);  // no empty route while customers are servable
  for (int i = 2; i < inst.num_nodes(); ++i) EXPECT_EQ(mask[i], 1);
}

TEST(MaskTest, RemainingCapacity) {
  const Instance inst = MakeInstance({{0, 0}}, {{0.1, 0}, {0.2, 0}, {0.3, 0}}, {37, 5, 3});
  RolloutState s = Step(inst, Step(inst, InitialState(inst), 0), 1);
  EXPECT_DOUBLE_EQ(s.remaining_capacity * 40, 3.0);
  const auto mask = FeasibleActions(inst, s);
  EXPECT_EQ(mask[2], 0);
  EXPECT_EQ(mask[3], 1);
  EXPECT_EQ(mask[0], 1);
  EXPECT_THROW(Step(inst, s, 2), std::invalid_argument);
}

TEST(MaskTest, TimeWindowMaskMatchesChecker) {
  const Instance inst = GenerateInstance(3, 2, Flags("MDVRPTW"), 11);
  for (int depot = 0; depot < 2; ++depot) {
    const RolloutState s = Step(inst, Step(inst, InitialState(inst), depot), 2);
    const auto mask = FeasibleActions(inst, s);
    for (int c = 3; c < 5; ++c) {
      EXPECT_EQ(mask[c] != 0, CompletableByChecker(inst, {depot, 2, c}, depot)) << "customer " << c;
    }
  }
}

TEST(MaskTest, CustomerMaskMatchesCheckerOnWalks) {
  Rng rng(5);
  int checked = 0;
  for (const VariantFlags& f : AllVariants()) {
    if (f.inter_depot) continue;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const Instance inst = GenerateInstance(5, 2, f, 1000 + seed);
      RolloutState s = InitialState(inst);
      while (!s.done()) {
        const auto mask = FeasibleActions(inst, s);
        if (s.phase == Phase::kRouteActive) {
          for (int c = 0; c < inst.num_customers(); ++c) {
            if (s.visited[c]) continue;
            std::vector<int> candidate = s.actions;
            candidate.push_back(inst.num_depots() + c);
            const bool ok = CompletableByChecker(inst, candidate, s.anchor);
            ASSERT_EQ(mask[inst.num_depots() + c] != 0, ok) << f.Name() << " seed " << seed;
            ++checked;
          }
        }
        std::vector<int> allowed;
        for (int i = 0; i < inst.num_nodes(); ++i) {
          if (mask[i]) allowed.push_back(i);
        }
        StepInPlace(inst, s, allowed[rng.Below(allowed.size())]);
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(MaskTest, SoundOnSmallInstances) {
  Rng rng(17);
  for (const VariantFlags& f : AllVariants()) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const Instance inst = GenerateInstance(static_cast<int>(4 + seed % 3), 2, f, 50 + seed);
      RolloutState s = InitialState(inst);
      while (!s.done()) {
        const auto mask = FeasibleActions(inst, s);
        std::vector<int> allowed;
        for (int a = 0; a < inst.num_nodes(); ++a) {
          if (!mask[a]) continue;
          allowed.push_back(a);
          const auto completion = AnyCompletion(inst, Step(inst, s, a));
          ASSERT_TRUE(completion.has_value()) << f.Name() << " action " << a;
          const FeasibilityVerdict v = CheckFeasible(inst, Solution{*completion, NAN});
          ASSERT_TRUE(v.ok) << f.Name() << ": " << v.message;
        }
        StepInPlace(inst, s, allowed[rng.Below(allowed.size())]);
      }
    }
  }
}

TEST(MaskTest, ProgressAndDepotExclusionOnRandomWalks) {
  Rng rng(23);
  for (const VariantFlags& f : AllVariants()) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Instance inst = GenerateInstance(10, 3, f, seed);
      for (RolloutState& start : InitRollouts(inst, StartMode::kTrain)) {
        const RolloutState s = RandomWalk(inst, start, rng);
        // Inside an active route two depots never follow each other.
        int anchor = -1;
        for (std::size_t k = 0; k < s.actions.size(); ++k) {
          const int a = s.actions[k];
          if (anchor < 0) {
            ASSERT_TRUE(inst.is_depot(a));
            anchor = a;
            continue;
          }
          if (inst.is_depot(a)) {
            ASSERT_FALSE(inst.is_depot(s.actions[k - 1])) << f.Name();
            if (a == anchor) anchor = -1;
          }
        }
        const FeasibilityVerdict v = CheckFeasible(inst, Solution{s.actions, NAN});
        ASSERT_TRUE(v.ok) << f.Name() << ": " << v.message;
        ASSERT_NEAR(v.cost, s.cost, 1e-9);
        ASSERT_EQ(s.num_visited, inst.num_customers());
      }
    }
  }
}

TEST(MaskTest, FinishedStateThrows) {
  const Instance inst = MakeInstance({{0, 0}}, {{0.3, 0.4}}, {1});
  RolloutState s = InitRollouts(inst, StartMode::kTrain)[0];
  StepInPlace(inst, s, 0);
  ASSERT_TRUE(s.done());
  EXPECT_THROW(FeasibleActions(inst, s), std::logic_error);
}

TEST(StepTest, DemandArithmetic) {
  const Instance inst = MakeInstance({{0, 0}}, {{0.3, 0.4}, {0.1, 0.1}}, {5, 5});
  const RolloutState s = Step(inst, Step(inst, InitialState(inst), 0), 1);
  EXPECT_DOUBLE_EQ(s.remaining_capacity, 35.0 / 40.0);
  EXPECT_DOUBLE_EQ(s.route_length, 0.5);
  EXPECT_EQ(s.visited[0], 1);
  EXPECT_EQ(s.visited[1], 0);
}

TEST(StepTest, WaitsForWindow) {
  Instance inst = MakeInstance({{0, 0}}, {{0.3, 0.4}}, {5}, Flags("MDVRPTW"));
  inst.tw_early[0] = 2.0;
  const RolloutState s = Step(inst, Step(inst, InitialState(inst), 0), 1);
  EXPECT_DOUBLE_EQ(s.elapsed_time, 2.0 + kServiceTime);
  EXPECT_DOUBLE_EQ(s.route_length, 0.5);
}

TEST(StepTest, TimeResetsAtNewAnchor) {
  const Instance inst = MakeInstance({{0, 0}, {1, 1}}, {{0.3, 0.4}, {0.9, 0.9}}, {5, 5}, Flags("MDVRPTW"));
  RolloutState s = InitialState(inst);
  for (int a : {0, 2, 0}) StepInPlace(inst, s, a);
  EXPECT_GT(s.elapsed_time, 0.0);
  StepInPlace(inst, s, 1);
  EXPECT_EQ(s.elapsed_time, 0.0);
  EXPECT_EQ(s.route_length, 0.0);
  EXPECT_EQ(s.remaining_capacity, 1.0);
}

TEST(StepTest, InterDepotReloadLegSum) {
  const std::vector<Point> depots = {{0.1, 0.1}, {0.6, 0.2}};
  const std::vector<Point> customers = {{0.4, 0.5}, {0.9, 0.7}};
  const Instance inst = MakeInstance(depots, customers, {30, 30}, Flags("MDVRPI"));
  RolloutState s = InitialState(inst);
  StepInPlace(inst, s, 0);
  StepInPlace(inst, s, 2);
  const auto mask = FeasibleActions(inst, s);
  EXPECT_EQ(mask[3], 0);  // 30 + 30 > 40
  EXPECT_EQ(mask[1], 1);
  StepInPlace(inst, s, 1);
  EXPECT_EQ(s.remaining_capacity, 1.0);
  EXPECT_EQ(s.anchor, 0);
  const auto at_reload = FeasibleActions(inst, s);
  EXPECT_EQ(at_reload[0], 0);  // no depot-to-depot move
  StepInPlace(inst, s, 3);
  StepInPlace(inst, s, 0);
  ASSERT_TRUE(s.done());
  const double legs = Distance(depots[0], customers[0]) + Distance(customers[0], depots[1]) +
                      Distance(depots[1], customers[1]) + Distance(customers[1], depots[0]);
  const FeasibilityVerdict v = CheckFeasible(inst, Solution{s.actions, NAN});
  ASSERT_TRUE(v.ok) << v.message;
  EXPECT_NEAR(s.cost, v.cost, 1e-12);
  EXPECT_NEAR(s.cost, legs, 1e-12);
}

TEST(StepTest, OpenRouteTerminateCostsNothing) {
  const Instance inst = MakeInstance({{0, 0}}, {{0.3, 0.4}}, {5}, Flags("MDOVRP"));
  RolloutState s = InitialState(inst);
  for (int a : {0, 1}) StepInPlace(inst, s, a);
  const double before = s.cost;
  StepInPlace(inst, s, 0);
  EXPECT_EQ(s.cost, before);
  EXPECT_TRUE(s.done());
}

TEST(StepTest, StrictBackhaulBlocksLaterLinehaul) {
  const Instance inst = MakeInstance({{0, 0}}, {{0.1, 0}, {0.2, 0}, {0.3, 0}}, {5, -5, 5},
                                     ParseVariant("MDVRPB", BackhaulMode::kStrict));
  RolloutState s = InitialState(inst);
  for (int a : {0, 1, 2}) StepInPlace(inst, s, a);
  EXPECT_EQ(FeasibleActions(inst, s)[3], 0);
  const Instance mixed = MakeInstance({{0, 0}}, {{0.1, 0}, {0.2, 0}, {0.3, 0}}, {5, -5, 5}, Flags("MDVRPB"));
  RolloutState t = InitialState(mixed);
  for (int a : {0, 1, 2}) StepInPlace(mixed, t, a);
  EXPECT_EQ(FeasibleActions(mixed, t)[3], 1);
}

TEST(RewardTest, SingleCustomer) {
  Trajectory t;
  t.actions = {0, 1, 0};
  EXPECT_DOUBLE_EQ(Reward(MakeInstance({{0, 0}}, {{0.3, 0.4}}, {5}), t), -1.0);
  EXPECT_DOUBLE_EQ(Reward(MakeInstance({{0, 0}}, {{0.3, 0.4}}, {5}, Flags("MDOVRP")), t), -0.5);
}

TEST(RewardTest, MultiRouteMatchesChecker) {
  const Instance inst = GenerateInstance(12, 2, Flags("MDVRPL"), 9);
  Rng rng(9);
  const RolloutState s = RandomWalk(inst, InitialState(inst), rng);
  const Trajectory t = ToTrajectory(s);
  int routes = 0;
  for (std::size_t k = 1; k < t.actions.size(); ++k) routes += inst.is_depot(t.actions[k]) && inst.is_depot(t.actions[k - 1]);
  EXPECT_GE(routes, 1);
  const FeasibilityVerdict v = CheckFeasible(inst, Solution{t.actions, NAN});
  ASSERT_TRUE(v.ok) << v.message;
  EXPECT_NEAR(Reward(inst, t), -v.cost, 1e-12);
}

TEST(RewardTest, IncompleteRejected) {
  const Instance inst = MakeInstance({{0, 0}}, {{0.3, 0.4}, {0.1, 0.1}}, {5, 5});
  Trajectory t;
  t.actions = {0, 2, 0};
  EXPECT_THROW(Reward(inst, t), std::invalid_argument);
  t.actions = {0, 2, 3, 0, 0};
  EXPECT_THROW(Reward(inst, t), std::invalid_argument);
}

}  // namespace
}  // namespace mdvrp
