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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qoc/dynamics.hpp"
#include "qoc/objectives.hpp"
#include "qoc/optimizer.hpp"

namespace qoc {

/// Which time series a scenario asks for.
struct OutputSelection {
    bool pulses = true;
    bool populations = true;
    bool integrand = true;
    bool purity = false;
    bool bloch = false;
    bool trajectories = false;
    /// Spacing of marker rows in the purity-plane export.
    double marker_interval = 2.5;
};

/// Values swept over. An empty axis means "use the base scenario value".
struct SweepAxes {
    std::vector<double> gamma_d;
    std::vector<double> gamma_pop;
    std::vector<double> f0;
    std::vector<double> a0;
    std::vector<TargetKind> functional;
};

struct Scenario {
    std::string name;
    std::string description;
    Problem problem;
    OptimizerConfig optimizer;
    SweepAxes axes;
    OutputSelection outputs;
    /// Evaluate each optimized pulse under this functional as well.
    std::optional<TargetKind> cross_functional;
    /// Evaluate the pulse optimized at this gamma_pop (other coordinates
    /// equal) in every point's system.
    std::optional<double> baseline_gamma_pop;
    /// Split fluence and F at this time into a first and second period.
    std::optional<double> split_time;

    void validate() const;
};

/// One fully specified optimization problem of a scenario.
struct SweepPoint {
    std::size_t index = 0;
    double gamma_d = 0.0;
    double gamma_pop = 0.0;
    double f0 = 0.0;
    double a0 = 0.0;
    TargetKind functional = TargetKind::TypeI;

    /// Stable identifier, e.g. "p03_type1_gd0.2_gp0_f0.2".
    std::string label() const;
};

/// Cartesian product of the axes in the order functional, gamma_d,
/// gamma_pop, f0, a0 (last varies fastest).
std::vector<SweepPoint> expand_sweep(const Scenario& scenario);
Problem problem_at(const Scenario& scenario, const SweepPoint& point);
OptimizerConfig config_at(const Scenario& scenario, const SweepPoint& point);

struct WindowSplit {
    double cut = 0.0;
    double fluence_first = 0.0;
    double fluence_second = 0.0;
    double F_first = 0.0;
    double F_second = 0.0;

    double fluence_ratio() const { return fluence_second / fluence_first; }
    double F_ratio() const { return F_second / F_first; }
};

/// eta-weighted fluence and F accumulated on [0, cut] and [cut, t_f].
/// `cut` is snapped to the nearest grid node.
WindowSplit split_at(const FunctionalReport& report, const ControlField& field, const Problem& problem, double cut);

struct PointResult {
    SweepPoint point;
    std::optional<OptimizationRun> run;
    /// Machine-readable failure reason ("config_error", "diverged", ...).
    std::string failure;
    std::string failure_message;
    std::optional<FunctionalReport> cross;
    std::optional<FunctionalReport> baseline;
    std::optional<WindowSplit> split;
    double final_purity = 0.0;

    bool failed() const { return !failure.empty(); }
};

struct ScenarioResult {
    Scenario scenario;
    std::vector<PointResult> points;

    std::size_t failed_points() const;
};

using PointCallback = std::function<void(const PointResult&)>;

/// Runs every sweep point on up to `jobs` threads. Results are ordered by
/// sweep index regardless of completion order; `on_done` may be called
/// from worker threads but never concurrently.
ScenarioResult run_scenario(const Scenario& scenario, int jobs = 1, const PointCallback& on_done = {});

/// Propagates once under `field` and evaluates `problem`'s functional with
/// penalty amplitude a0.
FunctionalReport cross_evaluate(const ControlField& field, const Problem& problem, double a0 = 1.0);

struct PurityTrace {
    std::vector<double> time;
    std::vector<double> p00;
    std::vector<double> coherence;  // |rho01|
    std::vector<double> purity;
    /// Grid indices of the marker rows.
    std::vector<std::size_t> markers;
};

/// Parametric (rho00, |rho01|) curve with purity. Throws ConfigError
/// unless marker_interval divides t_f.
PurityTrace purity_trajectory_export(const DensityTrajectory& traj, double marker_interval);

/// Purity over rho00 in [0, 1] x |rho01| in [0, 0.5], row-major in rho00.
struct PurityContour {
    std::size_t n = 0;
    std::vector<double> p00_axis;
    std::vector<double> coherence_axis;
    std::vector<double> values;

    double at(std::size_t i_p00, std::size_t j_coh) const { return values[i_p00 * n + j_coh]; }
};

PurityContour purity_contour(std::size_t n = 201);

/// Lab-frame carrier samples for any field: RWA quadratures map to
/// Ex cos(w10 t) - Ey sin(w10 t).
std::vector<double> lab_samples(const ControlField& field, const SystemSpec& sys, const TimeGrid& grid);

/// Quadrature envelopes of a lab field, demodulated at w10 and averaged
/// over one carrier period.
std::pair<std::vector<double>, std::vector<double>> demodulate(const ControlField& field, const SystemSpec& sys,
                                                               const TimeGrid& grid);

const std::vector<Scenario>& builtin_scenarios();
/// Accepts aliases for the companion figures (fig2 -> fig1 and so on).
std::optional<Scenario> find_builtin(std::string_view name);

}  // namespace qoc
