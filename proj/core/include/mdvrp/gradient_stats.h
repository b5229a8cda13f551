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

#ifndef MDVRP_GRADIENT_STATS_H_
#define MDVRP_GRADIENT_STATS_H_

#include <vector>

namespace mdvrp {

struct GradientStats {
  std::vector<double> variance;  // per parameter, unbiased across batches
  double mean_variance = 0.0;
  double magnitude = 0.0;  // mean L2 norm of the per-batch gradients
  // Mean over parameters of |mean| / std. Parameters whose gradient is 0 in
  // every batch are skipped; a zero std with a nonzero mean makes it +inf.
  double snr = 0.0;
  int batches = 0;
};

// Throws std::invalid_argument for fewer than 2 batches or ragged input.
GradientStats ComputeGradientStats(const std::vector<std::vector<double>>& batch_gradients);

}  // namespace mdvrp

#endif  // MDVRP_GRADIENT_STATS_H_
