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

#include "mdvrp/gradcheck.h"

#include <stdexcept>

#include "mdvrp/rollout.h"

namespace mdvrp {

std::string_view ToString(LossKind loss) { return loss == LossKind::kReinforce ? "reinforce" : "po"; }

LossKind ParseLossKind(std::string_view text) {
  if (text == "reinforce" || text == "rl") return LossKind::kReinforce;
  if (text == "po") return LossKind::kPreference;
  throw std::invalid_argument("unknown loss '" + std::string(text) + "' (expected reinforce or po)");
}

GradcheckReport RunGradcheck(const GradcheckConfig& config, LossKind loss) {
  const Instance inst = GenerateInstance(config.num_customers, config.num_depots, config.variant, config.seed);
  PolicyParams params = MakeInitializedPolicy(config.policy, config.seed, false);

  RolloutOptions options;
  options.starts = StartMode::kTrain;
  options.mode = DecodeMode::kSample;
  Rng rng = Rng::Derive(config.seed, {0x6763});
  std::vector<std::vector<int>> actions;
  std::vector<double> rewards;
  for (Trajectory& t : Rollout(params, inst, options, rng)) {
    rewards.push_back(-t.cost);
    actions.push_back(std::move(t.actions));
  }
  const PreferenceLabels labels =
      loss == LossKind::kPreference ? MakePreferenceLabels(rewards) : PreferenceLabels{};

  auto evaluate = [&](const PolicyParams& p, std::vector<ad::Matrix>* grads) {
    ad::Tape tape;
    BoundPolicy policy(tape, p);
    Rng unused(0);
    TapedRollout replay = RolloutOnTape(policy, inst, options, unused, &actions);
    ad::Var value = loss == LossKind::kReinforce ? ReinforceLoss(tape, replay.log_likelihood, rewards, 1)
                                                 : PoLoss(tape, replay.log_likelihood, labels, config.alpha, 1);
    if (grads != nullptr) {
      tape.Backward(value);
      tape.AccumulateParameterGradients(*grads);
    }
    return tape.value(value)[0];
  };

  std::vector<ad::Matrix> grads = params.ZerosLike();
  evaluate(params, &grads);
  std::vector<double> analytic;
  for (const ad::Matrix& g : grads) analytic.insert(analytic.end(), g.values().begin(), g.values().end());
  const std::vector<double> point = params.Flatten();

  PolicyParams probe = params;
  auto loss_at = [&](std::span<const double> flat) {
    probe.Unflatten(flat);
    return evaluate(probe, nullptr);
  };
  Rng coord_rng = Rng::Derive(config.seed, {0x636f6f7264});
  GradcheckReport report;
  report.loss = loss;
  report.num_parameters = point.size();
  report.diff = ad::FiniteDiffCheck(loss_at, point, analytic, config.step, config.tolerance, config.coordinates,
                                    coord_rng);
  std::size_t offset = report.diff.worst_index;
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (offset < params.tensor(t).size()) {
      report.worst_parameter = params.name(t) + "[" + std::to_string(offset) + "]";
      break;
    }
    offset -= params.tensor(t).size();
  }
  return report;
}

}  // namespace mdvrp
