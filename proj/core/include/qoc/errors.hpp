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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qoc {

/// Invalid or inconsistent problem description (bad rates, frames, edges...).
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Two objects that must share a time grid do not.
class GridMismatch : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The state became NaN/inf while time stepping.
class PropagationDiverged : public std::runtime_error {
  public:
    PropagationDiverged(std::size_t step, const std::string& what)
        : std::runtime_error(what + " diverged at step " + std::to_string(step)), step_(step) {}

    std::size_t step() const noexcept { return step_; }

  private:
    std::size_t step_;
};

}  // namespace qoc
