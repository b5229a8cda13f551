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

#include "mdvrp/curriculum.h"

#include <stdexcept>
#include <string>

namespace mdvrp {

namespace {

std::vector<VariantFlags> UpTo(int max_constraints) {
  std::vector<VariantFlags> pool;
  for (const VariantFlags& v : AllVariants()) {
    if (v.ConstraintCount() <= max_constraints) pool.push_back(v);
  }
  return pool;
}

std::vector<VariantFlags> WithMode(std::vector<VariantFlags> pool, BackhaulMode mode) {
  for (VariantFlags& v : pool) {
    if (v.backhaul) v.backhaul_mode = mode;
  }
  return pool;
}

}  // namespace

int CurriculumPhase(int epoch, int total_epochs) {
  if (total_epochs <= 0 || epoch < 0 || epoch >= total_epochs) {
    throw std::out_of_range("curriculum: epoch " + std::to_string(epoch) + " outside [0, " +
                            std::to_string(total_epochs) + ")");
  }
  const long long e10 = 10LL * epoch;
  if (e10 < 3LL * total_epochs) return 1;
  if (e10 < 6LL * total_epochs) return 2;
  if (e10 < 9LL * total_epochs) return 3;
  return 4;
}

std::vector<VariantFlags> PhaseOneVariants() {
  std::vector<VariantFlags> pool = UpTo(1);
  for (const char* name : {"MDOVRPTW", "MDVRPBTW", "MDVRPITW"}) pool.push_back(ParseVariant(name));
  return pool;
}

std::vector<VariantFlags> CurriculumVariants(int epoch, int total_epochs) {
  switch (CurriculumPhase(epoch, total_epochs)) {
    case 1: return PhaseOneVariants();
    case 2: return UpTo(2);
    case 3: return UpTo(3);
    default: return UpTo(5);
  }
}

std::string_view ToString(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kCurriculum: return "curriculum";
    case SamplerKind::kFull: return "full";
    case SamplerKind::kUnified: return "unified";
    case SamplerKind::kStandardCl: return "standard_cl";
    case SamplerKind::kFixed: return "fixed";
  }
  return "unknown";
}

SamplerKind ParseSamplerKind(std::string_view text) {
  for (SamplerKind k : {SamplerKind::kCurriculum, SamplerKind::kFull, SamplerKind::kUnified,
                        SamplerKind::kStandardCl, SamplerKind::kFixed}) {
    if (ToString(k) == text) return k;
  }
  throw std::invalid_argument("unknown sampler '" + std::string(text) +
                              "' (expected curriculum, full, unified, standard_cl or fixed)");
}

int BatchSampler::Phase(int epoch) const {
  if (kind == SamplerKind::kCurriculum || kind == SamplerKind::kStandardCl) {
    return CurriculumPhase(epoch, total_epochs);
  }
  if (epoch < 0 || epoch >= total_epochs) throw std::out_of_range("sampler: epoch out of range");
  return 0;
}

std::vector<VariantFlags> BatchSampler::Pool(int epoch) const {
  switch (kind) {
    case SamplerKind::kCurriculum:
      return WithMode(CurriculumVariants(epoch, total_epochs), backhaul_mode);
    case SamplerKind::kStandardCl: {
      const int phase = CurriculumPhase(epoch, total_epochs);
      return WithMode(phase == 1 ? UpTo(1) : CurriculumVariants(epoch, total_epochs), backhaul_mode);
    }
    case SamplerKind::kFull:
      return WithMode(UpTo(5), backhaul_mode);
    case SamplerKind::kUnified:
      return WithMode(UpTo(1), backhaul_mode);
    case SamplerKind::kFixed:
      if (!fixed.Valid()) throw std::invalid_argument("sampler: fixed variant combines O and I");
      return {fixed};
  }
  return {};
}

Batch SampleBatch(const BatchSampler& sampler, int epoch, int batch_size, int num_customers, int num_depots,
                  Rng& rng) {
  const std::vector<VariantFlags> pool = sampler.Pool(epoch);
  if (pool.empty()) throw std::logic_error("SampleBatch: empty variant pool");
  Batch batch;
  batch.variants.reserve(batch_size);
  batch.instances.reserve(batch_size);
  VariantFlags shared = pool[rng.Below(pool.size())];
  for (int i = 0; i < batch_size; ++i) {
    const VariantFlags v = sampler.mixed ? pool[rng.Below(pool.size())] : shared;
    batch.variants.push_back(v);
    batch.instances.push_back(GenerateInstance(num_customers, num_depots, v, rng.Next()));
  }
  return batch;
}

}  // namespace mdvrp
