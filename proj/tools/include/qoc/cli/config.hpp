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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qoc/experiments.hpp"

namespace qoc::cli {

/// Command-line settings shared by the subcommands.
struct RunConfig {
    std::string scenario;
    std::filesystem::path config_path;
    std::filesystem::path out;
    int jobs = 1;
    bool force = false;
    std::map<std::string, double> tolerances;
    /// Reserved; every algorithm here is deterministic.
    std::uint64_t seed = 0;
};

/// Parses a JSON scenario document. Missing keys take the built-in named by
/// "scenario" (if any) and then the library defaults. Errors name the
/// offending key, e.g. "window.edges: edges must be strictly increasing".
Scenario parse_config(std::string_view text);
Scenario scenario_from_json(const nlohmann::json& doc);

/// Full echo of a scenario; parse_config(to_json(s).dump()) reproduces s.
nlohmann::json to_json(const Scenario& scenario);

/// Tolerance override by name: delta_j, delta0, delta1, delta_f, streak,
/// fluence_precision, roundoff, a0_max_change.
void apply_tolerance(Scenario& scenario, std::string_view name, double value);

/// Splits "name=value".
std::pair<std::string, double> parse_tolerance_arg(std::string_view arg);

}  // namespace qoc::cli
