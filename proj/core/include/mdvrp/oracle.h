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

#ifndef MDVRP_ORACLE_H_
#define MDVRP_ORACLE_H_

#include <cstdint>

#include "mdvrp/env.h"
#include "mdvrp/feasibility.h"
#include "mdvrp/instance.h"

namespace mdvrp {

inline constexpr int kMaxExhaustiveCustomers = 8;

struct OracleOptions {
  // Adds the straight-line return to the anchor to the pruning bound on
  // closed routes. Off: prune on accumulated cost alone.
  bool nearest_return_bound = false;
  EnvOptions env;
};

struct OracleResult {
  Solution best;
  double cost = 0.0;
  std::uint64_t nodes_expanded = 0;
};

// Depth-first branch and bound over the environment's own action space.
// Actions are tried in increasing node order and only strictly better
// solutions replace the incumbent, so among optimal action sequences the
// lexicographically smallest is returned. Throws std::invalid_argument when
// the instance has more than kMaxExhaustiveCustomers customers.
OracleResult ExhaustiveSolve(const Instance& instance, const OracleOptions& options = {});

// Nearest feasible customer from the current position; the route closes when
// none is feasible, and the next route starts at the permitted depot nearest
// the centroid of the unserved customers. Ties go to the lowest index.
Solution GreedySolve(const Instance& instance, const EnvOptions& env = {});

// 100 * (objective - reference) / reference. Throws std::invalid_argument for
// a nonpositive reference.
double Gap(double objective, double reference);

}  // namespace mdvrp

#endif  // MDVRP_ORACLE_H_
