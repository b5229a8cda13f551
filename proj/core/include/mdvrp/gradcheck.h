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

#ifndef MDVRP_GRADCHECK_H_
#define MDVRP_GRADCHECK_H_

#include <cstdint>
#include <string>

#include "mdvrp/autodiff.h"
#include "mdvrp/losses.h"
#include "mdvrp/policy.h"
#include "mdvrp/variants.h"

namespace mdvrp {

struct GradcheckConfig {
  PolicyConfig policy{8, 2, 2, 16};
  int num_customers = 4;
  int num_depots = 2;
  VariantFlags variant;
  double alpha = kDefaultAlpha;
  double step = 1e-4;
  double tolerance = 1e-4;
  std::size_t coordinates = 256;
  std::uint64_t seed = 7;
};

struct GradcheckReport {
  LossKind loss = LossKind::kReinforce;
  ad::FiniteDiffReport diff;
  std::string worst_parameter;  // "<tensor>[<flat offset>]"
  std::size_t num_parameters = 0;
};

// Samples one set of POMO trajectories with random parameters, then compares
// the tape gradient of the loss with central differences while replaying
// those trajectories at every perturbed point.
GradcheckReport RunGradcheck(const GradcheckConfig& config, LossKind loss);

std::string_view ToString(LossKind loss);
LossKind ParseLossKind(std::string_view text);

}  // namespace mdvrp

#endif  // MDVRP_GRADCHECK_H_
