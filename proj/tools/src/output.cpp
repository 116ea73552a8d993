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

#include "qoc/cli/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <system_error>
#include <utility>

namespace qoc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
    std::array<char, 40> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return {buf.data(), ptr};
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::span<const double> row) {
    if (row.size() != header_.size()) throw std::invalid_argument("CSV row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) body_ += ',';
        body_ += format_double(row[i]);
    }
    body_ += '\n';
    ++rows_;
}

void CsvTable::add_columns(std::span<const std::span<const double>> columns) {
    if (columns.size() != header_.size()) throw std::invalid_argument("CSV column count does not match the header");
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != n) throw std::invalid_argument("CSV columns differ in length");
    }
    std::vector<double> row(columns.size());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) row[c] = columns[c][r];
        add_row(row);
    }
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += header_[i];
    }
    out += '\n';
    return out + body_;
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

OutputDirectory::OutputDirectory(fs::path target, bool force) : target_(std::move(target)), force_(force) {
    target_ = target_.lexically_normal();
    if (!target_.has_filename()) target_ = target_.parent_path();
    if (target_.empty()) throw OutputExists("output path must not be empty");
    if (fs::exists(target_ / "manifest.json") && !force_) {
        throw OutputExists("output directory " + target_.string() +
                           " already holds a completed run (use --force to replace it)");
    }
    if (fs::exists(target_) && !fs::is_directory(target_)) {
        throw OutputExists("output path " + target_.string() + " exists and is not a directory");
    }
    const fs::path parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
    fs::create_directories(parent);
    staging_ = parent / (target_.filename().string() + ".staging");
    fs::remove_all(staging_);
    fs::create_directories(staging_);
}

OutputDirectory::~OutputDirectory() {
    if (!committed_) {
        std::error_code ec;
        fs::remove_all(staging_, ec);
    }
}

void OutputDirectory::write(const std::string& relative, std::string_view content) {
    const fs::path path = staging_ / fs::path(relative);
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
    entries_.push_back({relative, content.size(), sha256_hex(content)});
}

void OutputDirectory::commit(json manifest) {
    json files = json::array();
    for (const ManifestEntry& e : entries_) {
        files.push_back({{"path", e.path}, {"size", e.size}, {"sha256", e.sha256}});
    }
    manifest["files"] = std::move(files);
    const std::string text = manifest.dump(2) + "\n";
    {
        std::ofstream out(staging_ / "manifest.json", std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) throw std::runtime_error("cannot write manifest.json");
    }
    if (fs::exists(target_)) {
        // Only reachable with --force, or for a directory without a manifest.
        fs::remove_all(target_);
    }
    fs::rename(staging_, target_);
    committed_ = true;
}

std::string write_field_json(const FieldFile& file) {
    json doc;
    doc["format"] = "qoc-field";
    doc["version"] = 1;
    doc["frame"] = std::string(to_string(file.field.frame()));
    doc["grid"] = {{"t_final", file.grid.t_final()}, {"n_steps", file.grid.n_steps()}};
    doc["system"] = {{"omega10", file.sys.omega10},
                     {"mu01", file.sys.mu01},
                     {"gamma_d", file.sys.gamma_d},
                     {"gamma_pop", file.sys.gamma_pop}};
    doc["penalty"] = {{"a0", file.a0}, {"ramp", file.ramp}};
    doc["x"] = std::vector<double>(file.field.x().begin(), file.field.x().end());
    if (file.field.frame() == Frame::RotatingRWA) {
        doc["y"] = std::vector<double>(file.field.y().begin(), file.field.y().end());
    }
    return doc.dump() + "\n";
}

FieldFile read_field_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("field: invalid JSON: ") + e.what());
    }
    auto need = [&](const json& node, const char* key, const char* path) -> const json& {
        if (!node.is_object() || !node.contains(key)) throw ConfigError(std::string("field.") + path + ": missing");
        return node.at(key);
    };
    try {
        if (doc.value("format", std::string{}) != "qoc-field") throw ConfigError("field.format: expected 'qoc-field'");
        FieldFile f;
        const Frame frame = frame_from_string(need(doc, "frame", "frame").get<std::string>());
        const json& grid = need(doc, "grid", "grid");
        f.grid = TimeGrid(need(grid, "t_final", "grid.t_final").get<double>(),
                          need(grid, "n_steps", "grid.n_steps").get<std::size_t>());
        const json& sys = need(doc, "system", "system");
        f.sys.omega10 = need(sys, "omega10", "system.omega10").get<double>();
        f.sys.mu01 = need(sys, "mu01", "system.mu01").get<double>();
        f.sys.gamma_d = need(sys, "gamma_d", "system.gamma_d").get<double>();
        f.sys.gamma_pop = need(sys, "gamma_pop", "system.gamma_pop").get<double>();
        f.sys.frame = frame;
        if (doc.contains("penalty")) {
            f.a0 = doc["penalty"].value("a0", 1.0);
            f.ramp = doc["penalty"].value("ramp", 1.0);
        }
        auto x = need(doc, "x", "x").get<std::vector<double>>();
        if (frame == Frame::LabExact) {
            f.field = ControlField::lab(std::move(x));
        } else {
            f.field = ControlField::rwa(std::move(x), need(doc, "y", "y").get<std::vector<double>>());
        }
        f.sys.validate();
        f.field.validate(f.grid, frame);
        return f;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field: malformed document: ") + e.what());
    }
}

namespace {

std::vector<double> grid_times(const TimeGrid& grid) {
    std::vector<double> t(grid.size());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = grid.time(j);
    return t;
}

std::string columns_csv(std::vector<std::string> header, const std::vector<std::span<const double>>& columns) {
    CsvTable table(std::move(header));
    table.add_columns(columns);
    return table.str();
}

}  // namespace

std::string pulse_csv(const ControlField& field, const SystemSpec& sys, const TimeGrid& grid) {
    const std::vector<double> t = grid_times(grid);
    const std::vector<double> lab = lab_samples(field, sys, grid);
    const auto [ex, ey] = demodulate(field, sys, grid);
    return columns_csv({"time", "field_lab", "envelope_x", "envelope_y"}, {t, lab, ex, ey});
}

std::string populations_csv(const DensityTrajectory& traj) {
    const std::vector<double> t = grid_times(traj.grid);
    std::vector<double> p0(traj.size()), p1(traj.size());
    for (std::size_t j = 0; j < traj.size(); ++j) {
        p0[j] = traj[j].p00;
        p1[j] = traj[j].p11;
    }
    return columns_csv({"time", "rho00", "rho11"}, {t, p0, p1});
}

std::string integrand_csv(const TimeGrid& grid, std::span<const double> integrand) {
    const std::vector<double> t = grid_times(grid);
    return columns_csv({"time", "integrand"}, {t, integrand});
}

std::string purity_csv(const PurityTrace& trace) {
    std::vector<double> marker(trace.time.size(), 0.0);
    for (std::size_t m : trace.markers) marker[m] = 1.0;
    return columns_csv({"time", "rho00", "abs_rho01", "purity", "marker"},
                       {trace.time, trace.p00, trace.coherence, trace.purity, marker});
}

std::string contour_csv(const PurityContour& contour) {
    CsvTable table({"rho00", "abs_rho01", "purity"});
    for (std::size_t i = 0; i < contour.n; ++i) {
        for (std::size_t j = 0; j < contour.n; ++j) {
            const double row[] = {contour.p00_axis[i], contour.coherence_axis[j], contour.at(i, j)};
            table.add_row(row);
        }
    }
    return table.str();
}

std::string bloch_csv(const DensityTrajectory& traj) {
    const std::vector<double> t = grid_times(traj.grid);
    std::vector<double> x(traj.size()), y(traj.size()), z(traj.size());
    for (std::size_t j = 0; j < traj.size(); ++j) {
        const BlochVector b = bloch_vector(traj[j]);
        x[j] = b.x;
        y[j] = b.y;
        z[j] = b.z;
    }
    return columns_csv({"time", "x", "y", "z"}, {t, x, y, z});
}

std::string trajectory_csv(const DensityTrajectory& traj) {
    const std::vector<double> t = grid_times(traj.grid);
    std::vector<double> p0(traj.size()), p1(traj.size()), re(traj.size()), im(traj.size());
    for (std::size_t j = 0; j < traj.size(); ++j) {
        p0[j] = traj[j].p00;
        p1[j] = traj[j].p11;
        re[j] = traj[j].c01.real();
        im[j] = traj[j].c01.imag();
    }
    return columns_csv({"time", "rho00", "rho11", "re_rho01", "im_rho01"}, {t, p0, p1, re, im});
}

std::string history_csv(std::span<const IterationRecord> history) {
    CsvTable table({"iteration", "F", "P", "J", "fluence", "a0", "step", "delta0", "delta1", "delta_F", "delta_J",
                    "streak"});
    for (const IterationRecord& r : history) {
        const double row[] = {static_cast<double>(r.k), r.F, r.P, r.J, r.f, r.a0, r.step, r.delta0, r.delta1,
                              r.delta_F, r.delta_J, static_cast<double>(r.streak)};
        table.add_row(row);
    }
    return table.str();
}

}  // namespace qoc::cli
