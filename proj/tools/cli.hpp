// Copyright 2026 The Peephole Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Entry point of the `peephole` command-line tool, kept in a library so tests
// can drive it without spawning processes.
#ifndef PEEPHOLE_TOOLS_CLI_HPP_
#define PEEPHOLE_TOOLS_CLI_HPP_

#include <ostream>
#include <span>
#include <string>

namespace peephole::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one command. `args` excludes the program name. Results go to `out`;
/// progress and the one-line diagnostic on failure go to `err`.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace peephole::cli

#endif  // PEEPHOLE_TOOLS_CLI_HPP_
