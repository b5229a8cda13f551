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

#include "mdvrp/policy.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mdvrp {

using ad::Matrix;
using ad::Tape;
using ad::Var;

void PolicyConfig::Validate() const {
  if (dim <= 0) throw std::invalid_argument("policy: dim must be positive");
  if (heads <= 0) throw std::invalid_argument("policy: heads must be positive");
  if (dim % heads != 0) throw std::invalid_argument("policy: dim must be divisible by heads");
  if (layers < 0) throw std::invalid_argument("policy: layers must be nonnegative");
  if (ff_hidden <= 0) throw std::invalid_argument("policy: ff_hidden must be positive");
  if (!(clip > 0.0)) throw std::invalid_argument("policy: clip must be positive");
}

PolicyParams::PolicyParams(const PolicyConfig& config) : config_(config) {
  config_.Validate();
  const int d = config.dim;
  slots_.depot_weight = Add("depot_proj.weight", d, kDepotFeatures);
  slots_.depot_bias = Add("depot_proj.bias", 1, d);
  slots_.customer_weight = Add("customer_proj.weight", d, kCustomerFeatures);
  slots_.customer_bias = Add("customer_proj.bias", 1, d);
  slots_.gamma_weight = Add("film_gamma.weight", d, kConditioningSize);
  slots_.gamma_bias = Add("film_gamma.bias", 1, d);
  slots_.beta_weight = Add("film_beta.weight", d, kConditioningSize);
  slots_.beta_bias = Add("film_beta.bias", 1, d);
  for (int l = 0; l < config.layers; ++l) {
    const std::string p = "encoder." + std::to_string(l) + ".";
    EncoderLayerSlots s{};
    s.wq = Add(p + "wq", d, d);
    s.wk = Add(p + "wk", d, d);
    s.wv = Add(p + "wv", d, d);
    s.wo = Add(p + "wo", d, d);
    s.norm1_scale = Add(p + "norm1.scale", 1, d);
    s.norm1_shift = Add(p + "norm1.shift", 1, d);
    s.ff1_weight = Add(p + "ff1.weight", config.ff_hidden, d);
    s.ff1_bias = Add(p + "ff1.bias", 1, config.ff_hidden);
    s.ff2_weight = Add(p + "ff2.weight", d, config.ff_hidden);
    s.ff2_bias = Add(p + "ff2.bias", 1, d);
    s.norm2_scale = Add(p + "norm2.scale", 1, d);
    s.norm2_shift = Add(p + "norm2.shift", 1, d);
    slots_.layers.push_back(s);
  }
  slots_.dec_wq = Add("decoder.wq", d, d + kContextSize);
  slots_.dec_wk = Add("decoder.wk", d, d);
  slots_.dec_wv = Add("decoder.wv", d, d);
  slots_.dec_wo = Add("decoder.wo", d, d);
}

int PolicyParams::Add(std::string name, int rows, int cols) {
  names_.push_back(std::move(name));
  tensors_.emplace_back(rows, cols);
  return static_cast<int>(tensors_.size()) - 1;
}

int PolicyParams::Index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  throw std::out_of_range("unknown parameter '" + std::string(name) + "'");
}

std::size_t PolicyParams::NumScalars() const {
  std::size_t total = 0;
  for (const Matrix& t : tensors_) total += t.size();
  return total;
}

std::vector<double> PolicyParams::Flatten() const {
  std::vector<double> flat;
  flat.reserve(NumScalars());
  for (const Matrix& t : tensors_) flat.insert(flat.end(), t.values().begin(), t.values().end());
  return flat;
}

void PolicyParams::Unflatten(std::span<const double> flat) {
  if (flat.size() != NumScalars()) throw std::invalid_argument("Unflatten: size mismatch");
  std::size_t k = 0;
  for (Matrix& t : tensors_) {
    for (double& v : t.values()) v = flat[k++];
  }
}

std::vector<Matrix> PolicyParams::ZerosLike() const {
  std::vector<Matrix> zeros;
  zeros.reserve(tensors_.size());
  for (const Matrix& t : tensors_) zeros.emplace_back(t.rows(), t.cols());
  return zeros;
}

namespace {

bool IsNormParameter(const std::string& name) { return name.find(".norm") != std::string::npos; }

// Fan-in of the linear map a tensor belongs to.
int FanIn(const PolicyParams& params, std::size_t i) {
  const std::string& name = params.name(i);
  if (name.size() > 5 && name.compare(name.size() - 5, 5, ".bias") == 0) {
    return params.at(name.substr(0, name.size() - 5) + ".weight").cols();
  }
  return params.tensor(i).cols();
}

}  // namespace

void InitUniform(PolicyParams& params, Rng& rng) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& t = params.tensor(i);
    const std::string& name = params.name(i);
    if (IsNormParameter(name)) {
      const bool scale = name.ends_with(".scale");
      t.Fill(scale ? 1.0 : 0.0);
      continue;
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(FanIn(params, i)));
    for (double& v : t.values()) v = rng.Uniform(-bound, bound);
  }
}

void InitFilmIdentity(PolicyParams& params) {
  const PolicySlots& s = params.slots();
  params.tensor(s.gamma_weight).Fill(0.0);
  params.tensor(s.gamma_bias).Fill(1.0);
  params.tensor(s.beta_weight).Fill(0.0);
  params.tensor(s.beta_bias).Fill(0.0);
}

PolicyParams MakeInitializedPolicy(const PolicyConfig& config, std::uint64_t seed, bool film_identity) {
  PolicyParams params(config);
  Rng rng = Rng::Derive(seed, {0x706f6c});
  InitUniform(params, rng);
  if (film_identity) InitFilmIdentity(params);
  return params;
}

Matrix DepotFeatures(const Instance& inst) {
  Matrix f(inst.num_depots(), kDepotFeatures);
  for (int j = 0; j < inst.num_depots(); ++j) {
    f(j, 0) = inst.depots[j].x;
    f(j, 1) = inst.depots[j].y;
  }
  return f;
}

Matrix CustomerFeatures(const Instance& inst) {
  Matrix f(inst.num_customers(), kCustomerFeatures);
  for (int i = 0; i < inst.num_customers(); ++i) {
    f(i, 0) = inst.customers[i].x;
    f(i, 1) = inst.customers[i].y;
    f(i, 2) = inst.demand[i];
    if (inst.flags.time_window) {
      f(i, 3) = inst.tw_early[i];
      f(i, 4) = inst.tw_late[i];
      f(i, 5) = inst.service_time[i];
    }
  }
  return f;
}

std::array<double, kContextSize> ContextFeatures(const Instance& inst, const RolloutState& s,
                                                 const PolicyConfig& config) {
  std::array<double, kContextSize> c{};
  c[0] = s.remaining_capacity;
  if (inst.flags.time_window) {
    c[1] = config.normalize_context ? s.elapsed_time / inst.depot_close : s.elapsed_time;
  }
  if (inst.flags.limit) {
    c[2] = config.normalize_context ? s.route_length / inst.route_limit : s.route_length;
  }
  c[3] = s.open_flag ? 1.0 : 0.0;
  c[4] = s.inter_depot_flag ? 1.0 : 0.0;
  return c;
}

BoundPolicy::BoundPolicy(Tape& tape, const PolicyParams& params) : tape_(&tape), params_(&params) {
  vars_.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    vars_.push_back(tape.Parameter(&params.tensor(i), static_cast<int>(i)));
  }
}

namespace {

Var Linear(const BoundPolicy& p, Var x, int weight, int bias) {
  Tape& t = p.tape();
  return t.AddRow(t.MatmulNT(x, p[weight]), p[bias]);
}

Var InstanceNorm(const BoundPolicy& p, Var x, int scale, int shift) {
  Tape& t = p.tape();
  Var mean = t.ReduceMeanRows(x);
  Var inv_std = t.Rsqrt(t.AddScalar(t.ReduceVarRows(x), 1e-5));
  Var normed = t.MulRow(t.SubRow(x, mean), inv_std);
  return t.AddRow(t.MulRow(normed, p[scale]), p[shift]);
}

void RequireFinite(const Matrix& m, int layer) {
  for (double v : m.values()) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("encoder layer " + std::to_string(layer) + " produced a non-finite value");
    }
  }
}

}  // namespace

Var EmbedDepots(const BoundPolicy& p, const Instance& inst) {
  const PolicySlots& s = p.params().slots();
  return Linear(p, p.tape().Constant(DepotFeatures(inst)), s.depot_weight, s.depot_bias);
}

Var EmbedCustomers(const BoundPolicy& p, const Instance& inst) {
  const PolicySlots& s = p.params().slots();
  return Linear(p, p.tape().Constant(CustomerFeatures(inst)), s.customer_weight, s.customer_bias);
}

Var Film(const BoundPolicy& p, Var customers, std::span<const double> z) {
  if (z.size() != kConditioningSize) {
    throw std::invalid_argument("Film: conditioning vector must have " + std::to_string(kConditioningSize) +
                                " entries, got " + std::to_string(z.size()));
  }
  Tape& t = p.tape();
  const PolicySlots& s = p.params().slots();
  Var zv = t.Constant(Matrix(1, kConditioningSize, std::vector<double>(z.begin(), z.end())));
  Var gamma = Linear(p, zv, s.gamma_weight, s.gamma_bias);
  Var beta = Linear(p, zv, s.beta_weight, s.beta_bias);
  return t.AddRow(t.MulRow(customers, gamma), beta);
}

Var Embed(const BoundPolicy& p, const Instance& inst) {
  Var depots = EmbedDepots(p, inst);
  Var customers = EmbedCustomers(p, inst);
  if (p.config().film) {
    const std::array<double, 5> z = inst.flags.Conditioning();
    customers = Film(p, customers, z);
  }
  return p.tape().ConcatRows(depots, customers);
}

Var Encode(const BoundPolicy& p, Var h, EncoderTrace* trace) {
  Tape& t = p.tape();
  const PolicyConfig& cfg = p.config();
  const int dk = cfg.head_dim();
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));
  RequireFinite(t.value(h), 0);
  for (int l = 0; l < cfg.layers; ++l) {
    const EncoderLayerSlots& s = p.params().slots().layers[l];
    Var q = t.MatmulNT(h, p[s.wq]);
    Var k = t.MatmulNT(h, p[s.wk]);
    Var v = t.MatmulNT(h, p[s.wv]);
    std::vector<Var> heads;
    for (int a = 0; a < cfg.heads; ++a) {
      Var scores = t.Scale(t.MatmulNT(t.SliceCols(q, a * dk, dk), t.SliceCols(k, a * dk, dk)), inv_sqrt_dk);
      Var weights = t.MaskedSoftmax(scores, {});
      if (trace != nullptr) trace->attention.push_back(t.value(weights));
      heads.push_back(t.Matmul(weights, t.SliceCols(v, a * dk, dk)));
    }
    Var attended = t.MatmulNT(heads.size() == 1 ? heads[0] : t.ConcatCols(heads), p[s.wo]);
    Var h1 = InstanceNorm(p, t.Add(h, attended), s.norm1_scale, s.norm1_shift);
    Var ff = Linear(p, t.Relu(Linear(p, h1, s.ff1_weight, s.ff1_bias)), s.ff2_weight, s.ff2_bias);
    h = InstanceNorm(p, t.Add(h1, ff), s.norm2_scale, s.norm2_shift);
    RequireFinite(t.value(h), l + 1);
  }
  return h;
}

DecoderCache PrepareDecoder(const BoundPolicy& p, Var encoded) {
  Tape& t = p.tape();
  const PolicySlots& s = p.params().slots();
  DecoderCache cache;
  cache.nodes = encoded;
  cache.keys = t.MatmulNT(encoded, p[s.dec_wk]);
  cache.values = t.MatmulNT(encoded, p[s.dec_wv]);
  cache.num_nodes = t.value(encoded).rows();
  return cache;
}

DecodeOutput DecodeStep(const BoundPolicy& p, const DecoderCache& cache, const std::vector<int>& previous,
                        const Matrix& context, std::vector<std::uint8_t> mask) {
  Tape& t = p.tape();
  const PolicyConfig& cfg = p.config();
  const PolicySlots& s = p.params().slots();
  const int rows = static_cast<int>(previous.size());
  if (context.rows() != rows || context.cols() != kContextSize) {
    throw std::invalid_argument("DecodeStep: context must be rows x " + std::to_string(kContextSize));
  }
  if (mask.size() != static_cast<std::size_t>(rows) * cache.num_nodes) {
    throw std::invalid_argument("DecodeStep: mask size does not match rows x nodes");
  }
  const int dk = cfg.head_dim();
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  Var prev = t.GatherRows(cache.nodes, previous);
  Var query = t.MatmulNT(t.ConcatCols({prev, t.Constant(context)}), p[s.dec_wq]);
  std::vector<Var> heads;
  for (int a = 0; a < cfg.heads; ++a) {
    Var scores = t.Scale(
        t.MatmulNT(t.SliceCols(query, a * dk, dk), t.SliceCols(cache.keys, a * dk, dk)), inv_sqrt_dk);
    Var weights = t.MaskedSoftmax(scores, mask);
    heads.push_back(t.Matmul(weights, t.SliceCols(cache.values, a * dk, dk)));
  }
  Var glimpse = t.MatmulNT(heads.size() == 1 ? heads[0] : t.ConcatCols(heads), p[s.dec_wo]);
  DecodeOutput out;
  out.compatibility = t.Scale(t.Tanh(t.Scale(t.MatmulNT(glimpse, cache.nodes), inv_sqrt_dk)), cfg.clip);
  out.log_probs = t.MaskedLogSoftmax(out.compatibility, std::move(mask));
  return out;
}

std::string_view ToString(DecodeMode mode) { return mode == DecodeMode::kGreedy ? "greedy" : "sample"; }

int Select(std::span<const double> probs, DecodeMode mode, Rng& rng) {
  double total = 0.0;
  int best = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("Select: invalid probability");
    total += p;
    if (p > 0.0 && (best < 0 || p > probs[best])) best = static_cast<int>(i);
  }
  if (best < 0) throw std::invalid_argument("Select: degenerate distribution");
  if (mode == DecodeMode::kGreedy) return best;
  const double u = rng.Uniform() * total;
  double acc = 0.0;
  int last = best;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last;
}

std::vector<double> ActionProbabilities(const PolicyParams& params, const Instance& inst,
                                        const RolloutState& state, const EnvOptions& options) {
  Tape tape;
  BoundPolicy policy(tape, params);
  DecoderCache cache = PrepareDecoder(policy, Encode(policy, Embed(policy, inst)));
  const std::array<double, kContextSize> ctx = ContextFeatures(inst, state, params.config());
  Matrix context(1, kContextSize, std::vector<double>(ctx.begin(), ctx.end()));
  const int previous = state.position == kNoNode ? 0 : state.position;
  DecodeOutput out = DecodeStep(policy, cache, {previous}, context, FeasibleActions(inst, state, options));
  std::vector<double> probs(inst.num_nodes());
  for (int i = 0; i < inst.num_nodes(); ++i) probs[i] = std::exp(tape.value(out.log_probs)(0, i));
  return probs;
}

}  // namespace mdvrp
