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

#include "mdvrp/variants.h"

#include <stdexcept>

namespace mdvrp {

namespace {

VariantFlags Make(bool open, bool backhaul, bool limit, bool tw, bool inter_depot) {
  VariantFlags flags;
  flags.open = open;
  flags.backhaul = backhaul;
  flags.limit = limit;
  flags.time_window = tw;
  flags.inter_depot = inter_depot;
  return flags;
}

}  // namespace

int VariantFlags::ConstraintCount() const {
  return int{open} + int{backhaul} + int{limit} + int{time_window} + int{inter_depot};
}

std::array<double, 5> VariantFlags::Conditioning() const {
  return {backhaul ? 1.0 : 0.0, limit ? 1.0 : 0.0, open ? 1.0 : 0.0, time_window ? 1.0 : 0.0,
          inter_depot ? 1.0 : 0.0};
}

std::string VariantFlags::Name() const {
  std::string name = "MD";
  if (open) name += "O";
  name += "VRP";
  if (inter_depot) name += "I";
  if (backhaul) name += "B";
  if (limit) name += "L";
  if (time_window) name += "TW";
  return name;
}

bool operator==(const VariantFlags& a, const VariantFlags& b) {
  if (a.open != b.open || a.backhaul != b.backhaul || a.limit != b.limit ||
      a.time_window != b.time_window || a.inter_depot != b.inter_depot) {
    return false;
  }
  return !a.backhaul || a.backhaul_mode == b.backhaul_mode;
}

const std::array<VariantFlags, kNumVariants>& AllVariants() {
  static const std::array<VariantFlags, kNumVariants> kVariants = {
      // O      B      L      TW     I
      Make(false, false, false, false, false),  // MDVRP
      Make(true, false, false, false, false),   // MDOVRP
      Make(false, true, false, false, false),   // MDVRPB
      Make(false, false, true, false, false),   // MDVRPL
      Make(false, false, false, true, false),   // MDVRPTW
      Make(true, false, false, true, false),    // MDOVRPTW
      Make(true, true, false, false, false),    // MDOVRPB
      Make(true, false, true, false, false),    // MDOVRPL
      Make(false, true, true, false, false),    // MDVRPBL
      Make(false, true, false, true, false),    // MDVRPBTW
      Make(false, false, true, true, false),    // MDVRPLTW
      Make(true, true, true, false, false),     // MDOVRPBL
      Make(true, true, false, true, false),     // MDOVRPBTW
      Make(true, false, true, true, false),     // MDOVRPLTW
      Make(false, true, true, true, false),     // MDVRPBLTW
      Make(true, true, true, true, false),      // MDOVRPBLTW
      Make(false, false, false, false, true),   // MDVRPI
      Make(false, true, false, false, true),    // MDVRPIB
      Make(false, false, true, false, true),    // MDVRPIL
      Make(false, false, false, true, true),    // MDVRPITW
      Make(false, true, true, false, true),     // MDVRPIBL
      Make(false, true, false, true, true),     // MDVRPIBTW
      Make(false, false, true, true, true),     // MDVRPILTW
      Make(false, true, true, true, true),      // MDVRPIBLTW
  };
  return kVariants;
}

VariantFlags ParseVariant(std::string_view token, BackhaulMode mode) {
  for (VariantFlags flags : AllVariants()) {
    if (flags.Name() == token) {
      flags.backhaul_mode = mode;
      return flags;
    }
  }
  // Recognize the O+I spellings so the error names the actual problem.
  for (bool b : {false, true}) {
    for (bool l : {false, true}) {
      for (bool tw : {false, true}) {
        VariantFlags flags = Make(true, b, l, tw, true);
        if (flags.Name() == token) {
          throw std::invalid_argument("variant " + std::string(token) +
                                      ": open routes and inter-depot routes are mutually exclusive");
        }
      }
    }
  }
  throw std::invalid_argument("unknown variant token: " + std::string(token));
}

std::string_view ToString(BackhaulMode mode) {
  return mode == BackhaulMode::kStrict ? "strict" : "mixed";
}

BackhaulMode ParseBackhaulMode(std::string_view text) {
  if (text == "mixed") return BackhaulMode::kMixed;
  if (text == "strict") return BackhaulMode::kStrict;
  throw std::invalid_argument("unknown backhaul mode: " + std::string(text));
}

}  // namespace mdvrp
