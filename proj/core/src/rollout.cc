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

#include "mdvrp/rollout.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mdvrp {

using ad::Matrix;
using ad::Var;

TapedRollout RolloutOnTape(const BoundPolicy& policy, const Instance& inst, const RolloutOptions& options,
                           Rng& rng, const std::vector<std::vector<int>>* replay) {
  ad::Tape& tape = policy.tape();
  const int nodes = inst.num_nodes();
  std::vector<RolloutState> states = InitRollouts(inst, options.starts, options.env);
  const int rows = static_cast<int>(states.size());
  if (replay != nullptr) {
    if (static_cast<int>(replay->size()) != rows) {
      throw std::invalid_argument("replay: expected " + std::to_string(rows) + " action lists");
    }
    for (int r = 0; r < rows; ++r) {
      const std::vector<int>& actions = (*replay)[r];
      for (int k = 0; k < states[r].forced_prefix; ++k) {
        if (k >= static_cast<int>(actions.size()) || actions[k] != states[r].actions[k]) {
          throw std::invalid_argument("replay: row " + std::to_string(r) + " does not match its start");
        }
      }
    }
  }

  DecoderCache cache = PrepareDecoder(policy, Encode(policy, Embed(policy, inst)));
  TapedRollout result;
  result.trajectories.resize(rows);
  for (int r = 0; r < rows; ++r) result.trajectories[r].forced_prefix = states[r].forced_prefix;

  std::vector<int> previous(rows);
  std::vector<int> chosen(rows);
  std::vector<double> probs(nodes);
  bool have_total = false;
  int active = 0;
  for (const RolloutState& s : states) active += s.done() ? 0 : 1;

  while (active > 0) {
    Matrix context(rows, kContextSize);
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(rows) * nodes, 0);
    for (int r = 0; r < rows; ++r) {
      const RolloutState& s = states[r];
      std::span<std::uint8_t> row_mask(mask.data() + static_cast<std::size_t>(r) * nodes, nodes);
      if (s.done()) {
        previous[r] = 0;
        row_mask[0] = 1;
        continue;
      }
      previous[r] = s.position;
      FeasibleActionsInto(inst, s, options.env, row_mask);
      const std::array<double, kContextSize> ctx = ContextFeatures(inst, s, policy.config());
      for (int k = 0; k < kContextSize; ++k) context(r, k) = ctx[k];
    }
    const std::vector<std::uint8_t> row_masks = mask;
    DecodeOutput out = DecodeStep(policy, cache, previous, context, std::move(mask));
    const Matrix& log_probs = tape.value(out.log_probs);
    for (int r = 0; r < rows; ++r) {
      RolloutState& s = states[r];
      if (s.done()) {
        chosen[r] = -1;
        continue;
      }
      int action;
      if (replay != nullptr) {
        const std::vector<int>& actions = (*replay)[r];
        if (s.actions.size() >= actions.size()) {
          throw std::invalid_argument("replay: row " + std::to_string(r) + " ends before completion");
        }
        action = actions[s.actions.size()];
        if (action < 0 || action >= nodes || !row_masks[static_cast<std::size_t>(r) * nodes + action]) {
          throw std::invalid_argument("replay: infeasible action " + std::to_string(action) + " in row " +
                                      std::to_string(r));
        }
      } else {
        for (int i = 0; i < nodes; ++i) probs[i] = std::exp(log_probs(r, i));
        action = Select(probs, options.mode, rng);
      }
      chosen[r] = action;
      result.trajectories[r].step_logprobs.push_back(log_probs(r, action));
      ApplyUnchecked(inst, s, action);
      if (s.done()) --active;
    }
    Var picked = tape.Pick(out.log_probs, chosen);
    result.log_likelihood = have_total ? tape.Add(result.log_likelihood, picked) : picked;
    have_total = true;
  }
  if (!have_total) result.log_likelihood = tape.Constant(Matrix(rows, 1));

  for (int r = 0; r < rows; ++r) {
    if (replay != nullptr && states[r].actions.size() != (*replay)[r].size()) {
      throw std::invalid_argument("replay: row " + std::to_string(r) + " has actions after completion");
    }
    result.trajectories[r].actions = std::move(states[r].actions);
    result.trajectories[r].cost = states[r].cost;
  }
  return result;
}

std::vector<Trajectory> Rollout(const PolicyParams& params, const Instance& inst, const RolloutOptions& options,
                                Rng& rng) {
  ad::Tape tape;
  BoundPolicy policy(tape, params);
  return RolloutOnTape(policy, inst, options, rng).trajectories;
}

EvalResult EvaluateGreedy(const PolicyParams& params, const Instance& inst, StartMode starts, bool augment8,
                          const EnvOptions& env) {
  EvalResult result;
  result.best_cost = INFINITY;
  RolloutOptions options;
  options.starts = starts;
  options.mode = DecodeMode::kGreedy;
  options.env = env;
  Rng unused(0);
  const int maps = augment8 ? 8 : 1;
  for (int k = 0; k < maps; ++k) {
    const Instance view = k == 0 ? inst : Augment(inst, k);
    for (Trajectory& t : Rollout(params, view, options, unused)) {
      ++result.num_trajectories;
      if (t.cost < result.best_cost) {
        result.best_cost = t.cost;
        result.best = t.ToSolution();
        result.best_augmentation = k;
      }
    }
  }
  return result;
}

}  // namespace mdvrp
