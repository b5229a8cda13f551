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

#ifndef MDVRP_POLICY_H_
#define MDVRP_POLICY_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdvrp/autodiff.h"
#include "mdvrp/env.h"
#include "mdvrp/instance.h"
#include "mdvrp/rng.h"

namespace mdvrp {

inline constexpr int kDepotFeatures = 2;
inline constexpr int kCustomerFeatures = 6;
inline constexpr int kConditioningSize = 5;
inline constexpr int kContextSize = 5;

struct PolicyConfig {
  int dim = 16;
  int heads = 2;
  int layers = 2;
  int ff_hidden = 64;
  double clip = 10.0;
  // Conditioning on the active-constraint vector. Off removes the modulation
  // entirely (the parameters stay allocated but are never read).
  bool film = true;
  // Divide elapsed time and route length by the depot closing time and the
  // route limit in the decoder context.
  bool normalize_context = true;

  int head_dim() const { return dim / heads; }
  // Throws std::invalid_argument describing the first bad field.
  void Validate() const;
  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

// Slot indices of every tensor inside PolicyParams::tensors.
struct EncoderLayerSlots {
  int wq, wk, wv, wo;
  int norm1_scale, norm1_shift;
  int ff1_weight, ff1_bias, ff2_weight, ff2_bias;
  int norm2_scale, norm2_shift;
};

struct PolicySlots {
  int depot_weight, depot_bias;
  int customer_weight, customer_bias;
  int gamma_weight, gamma_bias, beta_weight, beta_bias;
  std::vector<EncoderLayerSlots> layers;
  int dec_wq, dec_wk, dec_wv, dec_wo;
};

// Named parameter tensors. Linear weights are stored (out x in), biases and
// normalization parameters as 1 x out rows.
class PolicyParams {
 public:
  PolicyParams() = default;
  // Allocates zero tensors with the shapes implied by `config`.
  explicit PolicyParams(const PolicyConfig& config);

  const PolicyConfig& config() const { return config_; }
  const PolicySlots& slots() const { return slots_; }

  std::size_t size() const { return tensors_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  ad::Matrix& tensor(std::size_t i) { return tensors_[i]; }
  const ad::Matrix& tensor(std::size_t i) const { return tensors_[i]; }
  std::vector<ad::Matrix>& tensors() { return tensors_; }
  const std::vector<ad::Matrix>& tensors() const { return tensors_; }

  // Throws std::out_of_range for unknown names.
  int Index(std::string_view name) const;
  ad::Matrix& at(std::string_view name) { return tensors_[Index(name)]; }
  const ad::Matrix& at(std::string_view name) const { return tensors_[Index(name)]; }

  std::size_t NumScalars() const;
  std::vector<double> Flatten() const;
  void Unflatten(std::span<const double> flat);

  // Zero tensors with this layout, used as gradient accumulators.
  std::vector<ad::Matrix> ZerosLike() const;

  friend bool operator==(const PolicyParams& a, const PolicyParams& b) {
    return a.config_ == b.config_ && a.names_ == b.names_ && a.tensors_ == b.tensors_;
  }

 private:
  int Add(std::string name, int rows, int cols);

  PolicyConfig config_;
  PolicySlots slots_{};
  std::vector<std::string> names_;
  std::vector<ad::Matrix> tensors_;
};

// Every tensor uniform on [-1/sqrt(fan_in), 1/sqrt(fan_in)] except the
// normalization parameters (scale 1, shift 0).
void InitUniform(PolicyParams& params, Rng& rng);
// gamma weights 0 with bias 1, beta weights and bias 0: the modulation is an
// exact identity until trained.
void InitFilmIdentity(PolicyParams& params);

// Convenience: allocate and initialize.
PolicyParams MakeInitializedPolicy(const PolicyConfig& config, std::uint64_t seed, bool film_identity);

// Depot rows (x, y); customer rows (x, y, demand, e, l, s) with zeros for
// the time-window fields when time windows are inactive.
ad::Matrix DepotFeatures(const Instance& instance);
ad::Matrix CustomerFeatures(const Instance& instance);

// Decoder context row (C_t, T_t, D_t, o_t, id_t).
std::array<double, kContextSize> ContextFeatures(const Instance& instance, const RolloutState& state,
                                                 const PolicyConfig& config);

// Parameters bound as leaves of one tape.
class BoundPolicy {
 public:
  BoundPolicy(ad::Tape& tape, const PolicyParams& params);

  ad::Tape& tape() const { return *tape_; }
  const PolicyParams& params() const { return *params_; }
  const PolicyConfig& config() const { return params_->config(); }
  ad::Var operator[](int slot) const { return vars_[slot]; }

 private:
  ad::Tape* tape_;
  const PolicyParams* params_;
  std::vector<ad::Var> vars_;
};

struct EncoderTrace {
  // attention[layer * heads + head] is the (m+n) x (m+n) weight matrix.
  std::vector<ad::Matrix> attention;
};

// Pre-modulation embeddings.
ad::Var EmbedDepots(const BoundPolicy& policy, const Instance& instance);
ad::Var EmbedCustomers(const BoundPolicy& policy, const Instance& instance);
// gamma(z) * h + beta(z), row-wise. z must have kConditioningSize entries.
ad::Var Film(const BoundPolicy& policy, ad::Var customers, std::span<const double> z);
// Depot rows then customer rows, FiLM applied to customers when enabled.
ad::Var Embed(const BoundPolicy& policy, const Instance& instance);
// Encoder stack. Throws std::runtime_error naming the layer on a non-finite
// intermediate value.
ad::Var Encode(const BoundPolicy& policy, ad::Var embeddings, EncoderTrace* trace = nullptr);

// Static per-instance decoder tensors.
struct DecoderCache {
  ad::Var nodes;   // h^(L), (m+n) x d
  ad::Var keys;    // (m+n) x d
  ad::Var values;  // (m+n) x d
  int num_nodes = 0;
};

DecoderCache PrepareDecoder(const BoundPolicy& policy, ad::Var encoded);

struct DecodeOutput {
  ad::Var compatibility;  // R x (m+n), before masking
  ad::Var log_probs;      // R x (m+n), -inf at masked entries
};

// One decoding step for R rows at once. `previous[r]` is the node whose
// embedding enters the query, `context` is R x kContextSize, `mask` is
// R x (m+n) row-major. Throws std::logic_error when a row is fully masked.
DecodeOutput DecodeStep(const BoundPolicy& policy, const DecoderCache& cache,
                        const std::vector<int>& previous, const ad::Matrix& context,
                        std::vector<std::uint8_t> mask);

enum class DecodeMode { kGreedy, kSample };

std::string_view ToString(DecodeMode mode);

// Greedy: argmax with the lowest index winning ties. Sample: categorical
// draw. Throws std::invalid_argument for an all-zero or invalid vector.
int Select(std::span<const double> probs, DecodeMode mode, Rng& rng);

// Full forward pass for a single state, returning probabilities over all
// nodes. Intended for tests and tools; rollouts use DecodeStep directly.
std::vector<double> ActionProbabilities(const PolicyParams& params, const Instance& instance,
                                        const RolloutState& state, const EnvOptions& options = {});

}  // namespace mdvrp

#endif  // MDVRP_POLICY_H_
