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

#ifndef MDVRP_CURRICULUM_H_
#define MDVRP_CURRICULUM_H_

#include <string_view>
#include <vector>

#include "mdvrp/instance.h"
#include "mdvrp/rng.h"
#include "mdvrp/variants.h"

namespace mdvrp {

// Phase 1..4 for `epoch` of `total_epochs`: boundaries at 30%, 60% and 90%.
// Throws std::out_of_range unless 0 <= epoch < total_epochs.
int CurriculumPhase(int epoch, int total_epochs);

// The nine variants of the first phase: every single-constraint variant plus
// MDOVRPTW, MDVRPBTW and MDVRPITW.
std::vector<VariantFlags> PhaseOneVariants();

// Nested pools: phase 1 above, then all variants with at most two, three and
// finally all five side constraints.
std::vector<VariantFlags> CurriculumVariants(int epoch, int total_epochs);

enum class SamplerKind {
  kCurriculum,  // the staged pools above
  kFull,        // all 24 variants throughout
  kUnified,     // the 6 variants with at most one side constraint
  kStandardCl,  // staged, but phase 1 holds only the single-constraint variants
  kFixed,       // one variant
};

std::string_view ToString(SamplerKind kind);
SamplerKind ParseSamplerKind(std::string_view text);

struct BatchSampler {
  SamplerKind kind = SamplerKind::kCurriculum;
  VariantFlags fixed;  // used by kFixed
  BackhaulMode backhaul_mode = BackhaulMode::kMixed;
  int total_epochs = 1;
  bool mixed = false;  // draw a variant per instance instead of per batch

  std::vector<VariantFlags> Pool(int epoch) const;
  int Phase(int epoch) const;
};

struct Batch {
  std::vector<VariantFlags> variants;  // one per instance
  std::vector<Instance> instances;
};

// Uniform variant from the epoch's pool (per batch, or per instance when
// mixed), then `batch_size` fresh instances whose seeds come from `rng`.
Batch SampleBatch(const BatchSampler& sampler, int epoch, int batch_size, int num_customers, int num_depots,
                  Rng& rng);

}  // namespace mdvrp

#endif  // MDVRP_CURRICULUM_H_
