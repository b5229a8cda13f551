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

#include "mdvrp/gradient_stats.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdvrp {

GradientStats ComputeGradientStats(const std::vector<std::vector<double>>& grads) {
  if (grads.size() < 2) throw std::invalid_argument("gradient stats need at least 2 batches");
  const std::size_t dim = grads[0].size();
  for (const auto& g : grads) {
    if (g.size() != dim) throw std::invalid_argument("gradient stats: batches differ in size");
  }
  const double count = static_cast<double>(grads.size());
  GradientStats stats;
  stats.batches = static_cast<int>(grads.size());
  stats.variance.assign(dim, 0.0);

  for (const auto& g : grads) {
    double sq = 0.0;
    for (double v : g) sq += v * v;
    stats.magnitude += std::sqrt(sq);
  }
  stats.magnitude /= count;

  double snr_total = 0.0;
  std::size_t snr_terms = 0;
  for (std::size_t p = 0; p < dim; ++p) {
    double mean = 0.0;
    for (const auto& g : grads) mean += g[p];
    mean /= count;
    double ss = 0.0;
    bool all_zero = true;
    for (const auto& g : grads) {
      ss += (g[p] - mean) * (g[p] - mean);
      all_zero = all_zero && g[p] == 0.0;
    }
    stats.variance[p] = ss / (count - 1.0);
    stats.mean_variance += stats.variance[p];
    if (all_zero) continue;
    const double sd = std::sqrt(stats.variance[p]);
    snr_total += sd > 0.0 ? std::abs(mean) / sd : (mean != 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    ++snr_terms;
  }
  if (dim > 0) stats.mean_variance /= static_cast<double>(dim);
  stats.snr = snr_terms > 0 ? snr_total / static_cast<double>(snr_terms) : 0.0;
  return stats;
}

}  // namespace mdvrp
