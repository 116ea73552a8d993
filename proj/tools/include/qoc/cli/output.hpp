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
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qoc/experiments.hpp"

namespace qoc::cli {

/// Output directory already holds a completed run and --force was not given.
class OutputExists : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// 17 significant digits, "." decimal separator, independent of locale.
std::string format_double(double value);

/// RFC 4180 table: one header row, comma separated, "\n" line ends.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header);

    /// Row length must match the header.
    void add_row(std::span<const double> row);
    /// Appends one row per index of equally long columns.
    void add_columns(std::span<const std::span<const double>> columns);
    std::string str() const;
    std::size_t rows() const noexcept { return rows_; }

  private:
    std::vector<std::string> header_;
    std::string body_;
    std::size_t rows_ = 0;
};

std::string sha256_hex(std::string_view data);

struct ManifestEntry {
    std::string path;
    std::uintmax_t size = 0;
    std::string sha256;
};

/// Collects files in a staging directory next to `target` and renames it
/// into place on commit, so a completed directory always has a manifest.
class OutputDirectory {
  public:
    OutputDirectory(std::filesystem::path target, bool force);
    ~OutputDirectory();
    OutputDirectory(const OutputDirectory&) = delete;
    OutputDirectory& operator=(const OutputDirectory&) = delete;

    /// `relative` uses '/' separators; parent directories are created.
    void write(const std::string& relative, std::string_view content);
    const std::vector<ManifestEntry>& entries() const noexcept { return entries_; }

    /// Writes manifest.json (the given document plus a "files" list) and
    /// moves the staging directory to the target.
    void commit(nlohmann::json manifest);

    const std::filesystem::path& target() const noexcept { return target_; }

  private:
    std::filesystem::path target_;
    std::filesystem::path staging_;
    bool force_;
    bool committed_ = false;
    std::vector<ManifestEntry> entries_;
};

/// Field file: frame, grid, system, penalty amplitude and the samples.
struct FieldFile {
    ControlField field;
    TimeGrid grid;
    SystemSpec sys;
    double a0 = 1.0;
    double ramp = 1.0;
};

std::string write_field_json(const FieldFile& file);
FieldFile read_field_json(std::string_view text);

/// Per-file tables emitted by `run` and `propagate`.
std::string pulse_csv(const ControlField& field, const SystemSpec& sys, const TimeGrid& grid);
std::string populations_csv(const DensityTrajectory& traj);
std::string integrand_csv(const TimeGrid& grid, std::span<const double> integrand);
std::string purity_csv(const PurityTrace& trace);
std::string contour_csv(const PurityContour& contour);
std::string bloch_csv(const DensityTrajectory& traj);
std::string trajectory_csv(const DensityTrajectory& traj);
std::string history_csv(std::span<const IterationRecord> history);

}  // namespace qoc::cli
