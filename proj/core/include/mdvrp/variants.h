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

#ifndef MDVRP_VARIANTS_H_
#define MDVRP_VARIANTS_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace mdvrp {

enum class BackhaulMode { kMixed, kStrict };

// Active side constraints of a multi-depot VRP variant. Capacity is always on.
struct VariantFlags {
  bool open = false;
  bool backhaul = false;
  BackhaulMode backhaul_mode = BackhaulMode::kMixed;
  bool limit = false;
  bool time_window = false;
  bool inter_depot = false;

  // Open routes and inter-depot reloads contradict each other and are never
  // combined.
  bool Valid() const { return !(open && inter_depot); }

  // Number of active side constraints among O, B, L, TW, I.
  int ConstraintCount() const;

  // Conditioning vector z, ordered (B, L, O, TW, I).
  std::array<double, 5> Conditioning() const;

  // Canonical token, e.g. "MDOVRPBLTW" or "MDVRPIBTW".
  std::string Name() const;

  // Equality ignores backhaul_mode when backhaul is off.
  friend bool operator==(const VariantFlags& a, const VariantFlags& b);
};

inline constexpr int kNumVariants = 24;

// The 24 variants in canonical table order: the 16 combinations of
// {O, B, L, TW} followed by the 8 inter-depot combinations of {B, L, TW}.
const std::array<VariantFlags, kNumVariants>& AllVariants();

// Parses a canonical token. Throws std::invalid_argument for unknown tokens
// and for tokens combining O with I.
VariantFlags ParseVariant(std::string_view token, BackhaulMode mode = BackhaulMode::kMixed);

std::string_view ToString(BackhaulMode mode);
BackhaulMode ParseBackhaulMode(std::string_view text);

}  // namespace mdvrp

#endif  // MDVRP_VARIANTS_H_
