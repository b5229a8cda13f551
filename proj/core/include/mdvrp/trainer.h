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

#ifndef MDVRP_TRAINER_H_
#define MDVRP_TRAINER_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mdvrp/curriculum.h"
#include "mdvrp/env.h"
#include "mdvrp/losses.h"
#include "mdvrp/policy.h"

namespace mdvrp {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-6;  // L2 term added to the gradient
};

class Adam {
 public:
  Adam(const AdamConfig& config, const PolicyParams& params);
  // One update with learning rate `lr`.
  void Step(PolicyParams& params, const std::vector<ad::Matrix>& grads, double lr);
  int steps() const { return steps_; }

 private:
  AdamConfig config_;
  std::vector<ad::Matrix> m_;
  std::vector<ad::Matrix> v_;
  int steps_ = 0;
};

// Learning rate for `epoch`: base * gamma^(milestones passed).
double MultiStepLearningRate(double base, std::span<const int> milestones, double gamma, int epoch);

struct TrainConfig {
  PolicyConfig policy;
  bool film_identity_init = false;
  LossKind loss = LossKind::kPreference;
  double alpha = kDefaultAlpha;
  int epochs = 30;
  int instances_per_epoch = 2000;
  int batch_size = 32;
  int num_customers = 8;
  int num_depots = 2;
  AdamConfig adam;
  bool multistep_lr = false;
  std::vector<int> lr_milestones = {270, 295};
  double lr_gamma = 0.1;
  BatchSampler sampler;  // total_epochs is taken from `epochs`
  std::uint64_t seed = 1;
  int threads = 1;
  EnvOptions env;

  // Throws std::invalid_argument naming the first bad field.
  void Validate() const;
};

struct EpochMetrics {
  int epoch = 0;
  int phase = 0;
  int pool_size = 0;
  double loss = 0.0;
  double mean_cost = 0.0;
  double grad_norm = 0.0;
};

// Tab-separated: epoch, phase, pool_size, loss, mean_cost, grad_norm.
inline constexpr const char* kMetricsHeader = "epoch\tphase\tpool_size\tloss\tmean_cost\tgrad_norm";
std::string FormatMetrics(const EpochMetrics& m);

struct BatchOutcome {
  std::vector<ad::Matrix> gradient;  // summed over the batch, no weight decay
  double loss = 0.0;
  double mean_cost = 0.0;
};

// Samples POMO rollouts for every instance (stream seeded by `seed` and the
// instance position), builds the chosen loss and back-propagates. Per
// instance gradients are summed in index order so the result does not depend
// on `threads`. Throws std::runtime_error on a non-finite loss.
BatchOutcome ComputeBatchGradient(const PolicyParams& params, std::span<const Instance> instances, LossKind loss,
                                  double alpha, std::uint64_t seed, const EnvOptions& env, int threads);

double GradientNorm(const std::vector<ad::Matrix>& grads);
std::vector<double> FlattenGradient(const std::vector<ad::Matrix>& grads);

struct TrainResult {
  PolicyParams params;
  std::vector<EpochMetrics> metrics;
};

// Epoch loop. `init` overrides the fresh initialization (fine-tuning);
// `on_epoch` runs after every epoch with the current parameters.
TrainResult Train(const TrainConfig& config, const PolicyParams* init = nullptr,
                  const std::function<void(const EpochMetrics&, const PolicyParams&)>& on_epoch = {});

// Runs fn(i) for i in [0, count) on up to `threads` workers.
void ParallelFor(int count, int threads, const std::function<void(int)>& fn);

}  // namespace mdvrp

#endif  // MDVRP_TRAINER_H_
