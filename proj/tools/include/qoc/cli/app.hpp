// Copyright 2026 The qoc Authors
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

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qoc/cli/config.hpp"
#include "qoc/cli/output.hpp"

namespace qoc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailedPoint = 1;
inline constexpr int kExitConfigError = 2;

/// Per-point summary as written to manifest.json.
nlohmann::json point_summary(const PointResult& point);

/// Writes every requested table of `result` plus manifest.json into `out`.
void write_scenario_outputs(const ScenarioResult& result, OutputDirectory& out, const std::string& command);

/// Entry point shared by the executable and the tests. Returns the exit
/// status (0 ok, 1 failed sweep point, 2 configuration error).
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qoc::cli
