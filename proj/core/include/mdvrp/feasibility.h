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

#ifndef MDVRP_FEASIBILITY_H_
#define MDVRP_FEASIBILITY_H_

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mdvrp/instance.h"

namespace mdvrp {

// Action sequence of a full solution. Each route is written as
// [anchor, customers and reload depots..., anchor]; the closing anchor marks
// the end of the route even when routes are open.
struct Solution {
  std::vector<int> actions;
  double cost = std::numeric_limits<double>::quiet_NaN();  // NaN: not stated
};

struct FeasibilityVerdict {
  bool ok = true;
  std::string message;
  int route = -1;
  int step = -1;
  double cost = 0.0;  // recomputed total distance

  explicit operator bool() const { return ok; }
};

// Independent feasibility audit of a solution against every active
// constraint. Shares no code with the environment so that the two can
// cross-check each other. Throws std::out_of_range for node indices outside
// the instance and std::invalid_argument for an empty action list. When
// solution.cost is stated it must match the recomputed cost.
FeasibilityVerdict CheckFeasible(const Instance& instance, const Solution& solution);

}  // namespace mdvrp

#endif  // MDVRP_FEASIBILITY_H_
