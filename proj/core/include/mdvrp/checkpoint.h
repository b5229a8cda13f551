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

#ifndef MDVRP_CHECKPOINT_H_
#define MDVRP_CHECKPOINT_H_

#include <iosfwd>
#include <optional>
#include <string>

#include "mdvrp/policy.h"

namespace mdvrp {

// Text checkpoint:
//   MDVRP-CHECKPOINT 1
//   config dim <d> heads <A> layers <L> ff_hidden <d_a> clip <xi> film <0|1> normalize_context <0|1>
//   tensor <name> <rows> <cols>
//   <row of cols shortest round-trip decimals>   (rows lines)
//   ...
//   end
// Tensors appear in PolicyParams slot order.
void WriteCheckpoint(const PolicyParams& params, std::ostream& out);
std::string WriteCheckpointToString(const PolicyParams& params);
void WriteCheckpointFile(const PolicyParams& params, const std::string& path);

// Throws ParseError on malformed input. When `expected` is given, a header
// that disagrees with it is rejected before any tensor is read.
PolicyParams ReadCheckpoint(std::istream& in, const std::optional<PolicyConfig>& expected = std::nullopt);
PolicyParams ReadCheckpointFile(const std::string& path,
                                const std::optional<PolicyConfig>& expected = std::nullopt);

std::string DescribeConfig(const PolicyConfig& config);

}  // namespace mdvrp

#endif  // MDVRP_CHECKPOINT_H_
