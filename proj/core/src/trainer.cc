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

#include "mdvrp/trainer.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

#include "mdvrp/rollout.h"

namespace mdvrp {

using ad::Matrix;

Adam::Adam(const AdamConfig& config, const PolicyParams& params)
    : config_(config), m_(params.ZerosLike()), v_(params.ZerosLike()) {}

void Adam::Step(PolicyParams& params, const std::vector<Matrix>& grads, double lr) {
  if (grads.size() != params.size()) throw std::invalid_argument("Adam: gradient count mismatch");
  ++steps_;
  const double c1 = 1.0 - std::pow(config_.beta1, steps_);
  const double c2 = 1.0 - std::pow(config_.beta2, steps_);
  for (std::size_t t = 0; t < params.size(); ++t) {
    Matrix& w = params.tensor(t);
    const Matrix& g = grads[t];
    if (!w.SameShape(g)) throw std::invalid_argument("Adam: shape mismatch for " + params.name(t));
    Matrix& m = m_[t];
    Matrix& v = v_[t];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i] + config_.weight_decay * w[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * gi;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * gi * gi;
      w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
    }
  }
}

double MultiStepLearningRate(double base, std::span<const int> milestones, double gamma, int epoch) {
  double lr = base;
  for (int m : milestones) {
    if (epoch >= m) lr *= gamma;
  }
  return lr;
}

void TrainConfig::Validate() const {
  policy.Validate();
  if (epochs < 0) throw std::invalid_argument("epochs must be nonnegative");
  if (instances_per_epoch <= 0) throw std::invalid_argument("instances_per_epoch must be positive");
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
  if (num_customers <= 0) throw std::invalid_argument("customers must be positive");
  if (num_depots <= 0) throw std::invalid_argument("depots must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(adam.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (threads <= 0) throw std::invalid_argument("threads must be positive");
  if (num_customers + num_depots - 1 < 2 && loss == LossKind::kPreference) {
    throw std::invalid_argument("preference loss needs at least 2 trajectories per instance");
  }
}

std::string FormatMetrics(const EpochMetrics& m) {
  return std::to_string(m.epoch) + '\t' + std::to_string(m.phase) + '\t' + std::to_string(m.pool_size) + '\t' +
         FormatDouble(m.loss) + '\t' + FormatDouble(m.mean_cost) + '\t' + FormatDouble(m.grad_norm);
}

void ParallelFor(int count, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double GradientNorm(const std::vector<Matrix>& grads) {
  double sq = 0.0;
  for (const Matrix& g : grads) {
    for (double v : g.values()) sq += v * v;
  }
  return std::sqrt(sq);
}

std::vector<double> FlattenGradient(const std::vector<Matrix>& grads) {
  std::vector<double> flat;
  for (const Matrix& g : grads) flat.insert(flat.end(), g.values().begin(), g.values().end());
  return flat;
}

BatchOutcome ComputeBatchGradient(const PolicyParams& params, std::span<const Instance> instances, LossKind loss,
                                  double alpha, std::uint64_t seed, const EnvOptions& env, int threads) {
  const int count = static_cast<int>(instances.size());
  if (count == 0) throw std::invalid_argument("ComputeBatchGradient: empty batch");
  struct Item {
    std::vector<Matrix> grad;
    double loss = 0.0;
    double cost_sum = 0.0;
    int trajectories = 0;
  };
  std::vector<Item> items(count);
  ParallelFor(count, threads, [&](int i) {
    const Instance& inst = instances[i];
    ad::Tape tape;
    BoundPolicy policy(tape, params);
    Rng rng = Rng::Derive(seed, {static_cast<std::uint64_t>(i)});
    RolloutOptions options;
    options.starts = StartMode::kTrain;
    options.mode = DecodeMode::kSample;
    options.env = env;
    TapedRollout rollout = RolloutOnTape(policy, inst, options, rng);
    std::vector<double> rewards;
    rewards.reserve(rollout.trajectories.size());
    Item& item = items[i];
    for (const Trajectory& t : rollout.trajectories) {
      rewards.push_back(-t.cost);
      item.cost_sum += t.cost;
    }
    item.trajectories = static_cast<int>(rewards.size());
    ad::Var value = loss == LossKind::kReinforce
                        ? ReinforceLoss(tape, rollout.log_likelihood, rewards, count)
                        : PoLoss(tape, rollout.log_likelihood, MakePreferenceLabels(rewards), alpha, count);
    item.loss = tape.value(value)[0];
    if (!std::isfinite(item.loss)) {
      throw std::runtime_error("non-finite loss for batch item " + std::to_string(i) + " (variant " +
                               inst.flags.Name() + ", instance seed " + std::to_string(inst.seed) + ")");
    }
    tape.Backward(value);
    item.grad = params.ZerosLike();
    tape.AccumulateParameterGradients(item.grad);
  });

  BatchOutcome out;
  out.gradient = params.ZerosLike();
  double cost_sum = 0.0;
  int trajectories = 0;
  for (const Item& item : items) {
    for (std::size_t t = 0; t < out.gradient.size(); ++t) {
      Matrix& dst = out.gradient[t];
      const Matrix& src = item.grad[t];
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
    out.loss += item.loss;
    cost_sum += item.cost_sum;
    trajectories += item.trajectories;
  }
  out.mean_cost = cost_sum / trajectories;
  return out;
}

TrainResult Train(const TrainConfig& config, const PolicyParams* init,
                  const std::function<void(const EpochMetrics&, const PolicyParams&)>& on_epoch) {
  config.Validate();
  TrainResult result;
  if (init != nullptr) {
    if (!(init->config() == config.policy)) {
      throw std::invalid_argument("initial parameters do not match the policy configuration");
    }
    result.params = *init;
  } else {
    result.params = MakeInitializedPolicy(config.policy, config.seed, config.film_identity_init);
  }
  BatchSampler sampler = config.sampler;
  sampler.total_epochs = std::max(config.epochs, 1);
  Adam adam(config.adam, result.params);
  const int batches = (config.instances_per_epoch + config.batch_size - 1) / config.batch_size;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.multistep_lr ? MultiStepLearningRate(config.adam.learning_rate, config.lr_milestones,
                                                                  config.lr_gamma, epoch)
                                          : config.adam.learning_rate;
    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.phase = sampler.Phase(epoch);
    metrics.pool_size = static_cast<int>(sampler.Pool(epoch).size());
    double cost_total = 0.0;
    for (int b = 0; b < batches; ++b) {
      const int size = std::min(config.batch_size, config.instances_per_epoch - b * config.batch_size);
      Rng data_rng = Rng::Derive(config.seed, {1, static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(b)});
      Batch batch = SampleBatch(sampler, epoch, size, config.num_customers, config.num_depots, data_rng);
      const std::uint64_t rollout_seed = Rng::Derive(config.seed, {2, static_cast<std::uint64_t>(epoch),
                                                                   static_cast<std::uint64_t>(b)})
                                             .Next();
      BatchOutcome outcome = ComputeBatchGradient(result.params, batch.instances, config.loss, config.alpha,
                                                  rollout_seed, config.env, config.threads);
      adam.Step(result.params, outcome.gradient, lr);
      metrics.loss += outcome.loss;
      metrics.grad_norm += GradientNorm(outcome.gradient);
      cost_total += outcome.mean_cost;
    }
    metrics.loss /= batches;
    metrics.grad_norm /= batches;
    metrics.mean_cost = cost_total / batches;
    result.metrics.push_back(metrics);
    if (on_epoch) on_epoch(metrics, result.params);
  }
  return result;
}

}  // namespace mdvrp
