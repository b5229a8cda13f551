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

#include "mdvrp/losses.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdvrp {

double SharedBaseline(std::span<const double> rewards) {
  if (rewards.empty()) throw std::invalid_argument("SharedBaseline: empty reward list");
  // Neumaier summation; the mean feeds every advantage.
  double total = 0.0;
  double carry = 0.0;
  for (double r : rewards) {
    const double t = total + r;
    carry += std::abs(total) >= std::abs(r) ? (total - t) + r : (r - t) + total;
    total = t;
  }
  return (total + carry) / static_cast<double>(rewards.size());
}

std::vector<double> Advantages(std::span<const double> rewards) {
  const double b = SharedBaseline(rewards);
  std::vector<double> adv(rewards.begin(), rewards.end());
  for (double& a : adv) a -= b;
  return adv;
}

ad::Var ReinforceLoss(ad::Tape& tape, ad::Var log_likelihood, std::span<const double> rewards, int batch_size) {
  const ad::Matrix& ll = tape.value(log_likelihood);
  if (ll.cols() != 1 || ll.rows() != static_cast<int>(rewards.size())) {
    throw std::invalid_argument("ReinforceLoss: " + std::to_string(rewards.size()) + " rewards for " +
                                std::to_string(ll.rows()) + " trajectories");
  }
  if (batch_size <= 0) throw std::invalid_argument("ReinforceLoss: batch size must be positive");
  const int n = ll.rows();
  ad::Var adv = tape.Constant(ad::Matrix(n, 1, Advantages(rewards)));
  return tape.Scale(tape.Sum(tape.Mul(adv, log_likelihood)), -1.0 / (static_cast<double>(batch_size) * n));
}

PreferenceLabels MakePreferenceLabels(std::span<const double> rewards) {
  if (rewards.size() < 2) throw std::invalid_argument("MakePreferenceLabels: need at least 2 rewards");
  PreferenceLabels labels;
  labels.size = static_cast<int>(rewards.size());
  labels.y.assign(rewards.size() * rewards.size(), 0);
  for (int j = 0; j < labels.size; ++j) {
    for (int k = 0; k < labels.size; ++k) {
      const double rj = rewards[j];
      const double rk = rewards[k];
      const double tol = kTieTolerance * std::max(std::abs(rj), std::abs(rk));
      if (rj - rk > tol) {
        labels.y[static_cast<std::size_t>(j) * labels.size + k] = 1;
        ++labels.labeled_pairs;
      }
    }
  }
  return labels;
}

ad::Var PoLoss(ad::Tape& tape, ad::Var log_likelihood, const PreferenceLabels& labels, double alpha,
               int batch_size) {
  if (!(alpha > 0.0)) throw std::invalid_argument("PoLoss: alpha must be positive");
  if (batch_size <= 0) throw std::invalid_argument("PoLoss: batch size must be positive");
  const ad::Matrix& ll = tape.value(log_likelihood);
  const int n = labels.size;
  if (ll.cols() != 1 || ll.rows() != n) {
    throw std::invalid_argument("PoLoss: labels for " + std::to_string(n) + " trajectories, got " +
                                std::to_string(ll.rows()));
  }
  ad::Matrix y(n, n);
  for (std::size_t i = 0; i < labels.y.size(); ++i) y[i] = labels.y[i];
  ad::Var log_pref = tape.Log(tape.Sigmoid(tape.Scale(tape.PairwiseDiff(log_likelihood), alpha)));
  ad::Var total = tape.Sum(tape.Mul(tape.Constant(std::move(y)), log_pref));
  return tape.Scale(total, -1.0 / (static_cast<double>(batch_size) * n * n));
}

}  // namespace mdvrp
