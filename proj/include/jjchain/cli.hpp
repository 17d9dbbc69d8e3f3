// Copyright 2026 The jjchain Authors
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

#pragma once

#include <string>
#include <vector>

#include "jjchain/config.hpp"

namespace jjchain {

/// Process exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_io_error = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_error = 3;

/// Executes a validated configuration and writes its output bundle.
/// Returns the files written.
std::vector<std::string> execute(const RunConfig& config, const std::string& command_line);

/// Full command-line entry point; never throws.
int run(int argc, const char* const* argv);

} // namespace jjchain
