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

#ifndef MDVRP_LOSSES_H_
#define MDVRP_LOSSES_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mdvrp/autodiff.h"

namespace mdvrp {

inline constexpr double kDefaultAlpha = 0.03;

// Mean reward. Throws std::invalid_argument on an empty list.
double SharedBaseline(std::span<const double> rewards);
// reward - mean, per trajectory.
std::vector<double> Advantages(std::span<const double> rewards);

// Contribution of one instance to the batch REINFORCE loss
//   -(1 / (B N)) sum_j adv_j * log_likelihood_j
// with the advantages held constant. `log_likelihood` is N x 1.
ad::Var ReinforceLoss(ad::Tape& tape, ad::Var log_likelihood, std::span<const double> rewards,
                      int batch_size);

// Ordered-pair labels: y(j, k) = 1 iff r_j beats r_k. Rewards within a
// relative 1e-12 of each other count as tied and carry no label.
struct PreferenceLabels {
  int size = 0;
  std::vector<std::uint8_t> y;  // size x size, row-major
  int labeled_pairs = 0;        // number of ordered pairs with y = 1

  std::uint8_t operator()(int j, int k) const { return y[static_cast<std::size_t>(j) * size + k]; }
  friend bool operator==(const PreferenceLabels&, const PreferenceLabels&) = default;
};

inline constexpr double kTieTolerance = 1e-12;

// Throws std::invalid_argument for fewer than 2 rewards.
PreferenceLabels MakePreferenceLabels(std::span<const double> rewards);

// Contribution of one instance to the batch preference loss
//   -(1 / (B N^2)) sum_{j,k} y(j,k) log sigmoid(alpha (l_j - l_k)).
// Throws std::invalid_argument for alpha <= 0.
ad::Var PoLoss(ad::Tape& tape, ad::Var log_likelihood, const PreferenceLabels& labels, double alpha,
               int batch_size);

enum class LossKind { kReinforce, kPreference };

}  // namespace mdvrp

#endif  // MDVRP_LOSSES_H_
