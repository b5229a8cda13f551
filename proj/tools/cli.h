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

#ifndef MDVRP_TOOLS_CLI_H_
#define MDVRP_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace mdvrp::cli {

// Environment variables named MDVRP_<FLAG> (upper case, dashes as
// underscores) supply defaults for every long flag, e.g. MDVRP_SEED,
// MDVRP_THREADS, MDVRP_EPOCHS.
inline constexpr const char* kEnvPrefix = "MDVRP_";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAuditFailure = 1;
inline constexpr int kExitRuntimeError = 2;
inline constexpr int kExitUsage = 64;

// Parses `args` (without the program name) and runs the selected
// subcommand. Human-readable lines go to `out`, diagnostics to `err`; the
// last line written to `out` is a one-line JSON summary.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mdvrp::cli

#endif  // MDVRP_TOOLS_CLI_H_
