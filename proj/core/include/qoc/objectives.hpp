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
#include <span>
#include <string_view>
#include <vector>

#include "qoc/dynamics.hpp"

namespace qoc {

/// TypeI: Hermitian rotating coherence projector, F = 2 Re int y <<W|rho>>.
/// TypeII: W = 2|1><0|, F = int y |<<W|rho>>|^2.
enum class TargetKind { TypeI, TypeII };

std::string_view to_string(TargetKind kind);
TargetKind target_kind_from_string(std::string_view name);

struct TargetSpec {
    TargetKind kind = TargetKind::TypeI;
    double omega = 30.0;  // TypeI only
    double theta = 0.0;   // TypeI only

    static TargetSpec type_one(double omega, double theta = 0.0) { return {TargetKind::TypeI, omega, theta}; }
    static TargetSpec type_two() { return {TargetKind::TypeII, 0.0, 0.0}; }
};

/// Smooth 0/1 envelope y(t) = sum_j (-1)^j sigmoid(alpha (t - edge_j)).
struct ControlWindow {
    std::vector<double> edges{5.0, 20.0};
    double alpha = 3.0;

    void validate(double t_final) const;
};

/// A(t) = a0 * eta(t): sine ramps of width `ramp` at both ends, unit plateau.
struct PenaltyWeight {
    double a0 = 1.0;
    double ramp = 1.0;
    double t_final = 25.0;

    void validate() const;
    double shape(double t) const { return shape_at(t, t_final - t); }
    double amplitude(double t) const { return a0 * shape(t); }
    /// eta given the elapsed and remaining time separately, so grid endpoints
    /// hit exactly zero.
    double shape_at(double t, double remaining) const;
};

/// Everything except the optimizer settings that defines one control problem.
struct Problem {
    SystemSpec sys;
    TimeGrid grid{25.0, 30000};
    TargetSpec target;
    ControlWindow window;
    double ramp = 1.0;

    void validate() const;
    PenaltyWeight penalty(double a0) const { return {a0, ramp, grid.t_final()}; }
};

struct FunctionalReport {
    double F = 0.0;
    double P = 0.0;
    double J = 0.0;
    /// eta-weighted fluence int E^2 / eta dt, so that P = f / a0.
    double f = 0.0;
    /// Unweighted int E^2 dt, for comparison.
    double fluence_plain = 0.0;
    /// F integrand on the grid: 2 y Re<<W|rho>> or y |<<W|rho>>|^2.
    std::vector<double> integrand;
    /// Samples with |E| > 1e-8 where eta < 1e-12 (the 0/0 convention hid them).
    std::size_t endpoint_warnings = 0;
};

double window_envelope(double t, const ControlWindow& window);
double penalty_weight(double t, const PenaltyWeight& pw);

std::vector<double> sample_window(const ControlWindow& window, const TimeGrid& grid);
std::vector<double> sample_shape(const PenaltyWeight& pw, const TimeGrid& grid);

/// Trapezoidal rule over samples [first, last] of a grid-sampled function.
double trapezoid(std::span<const double> values, double dt, std::size_t first, std::size_t last);
double trapezoid(std::span<const double> values, double dt);

/// y(t) and W(t) sampled at grid nodes and half steps, reused across sweeps.
struct TargetTrack {
    std::vector<double> y_node;
    std::vector<double> y_half;
    std::vector<Op2> w_node;
    std::vector<Op2> w_half;

    static TargetTrack build(const Problem& problem);
};

/// W(t) expressed in the propagation frame of `sys`.
Op2 target_operator(double t, const TargetSpec& target, const SystemSpec& sys);

/// <<W(t)|rho>> = Tr{W^dagger(t) rho}. Real for TypeI.
cplx target_expectation(const DensityState& rho, double t, const TargetSpec& target, const SystemSpec& sys);

/// The F integrand for a given expectation value and envelope value.
double integrand_value(cplx expectation, double y, TargetKind kind);

/// Costate inhomogeneity: y W (TypeI) or W y <<W|rho>> (TypeII).
Op2 costate_source(double t, const DensityState& rho, const TargetSpec& target, const ControlWindow& window,
                   const SystemSpec& sys);

/// Source track for a backward sweep. TypeII needs rho at half steps, taken
/// from cubic Hermite interpolation of the reference trajectory.
SourceTrack build_source_track(const Problem& problem, const DensityTrajectory& reference,
                               const ControlField& reference_field);
SourceTrack build_source_track(const Problem& problem, const TargetTrack& track, const DensityTrajectory& reference,
                               const ControlField& reference_field);

/// eta-weighted fluence, with the 0/0 -> 0 endpoint convention.
double weighted_fluence(const ControlField& field, const TimeGrid& grid, double ramp,
                        std::size_t* endpoint_warnings = nullptr);
double plain_fluence(const ControlField& field, const TimeGrid& grid);

FunctionalReport evaluate_functionals(const DensityTrajectory& traj, const ControlField& field,
                                      const Problem& problem, const PenaltyWeight& pw);
FunctionalReport evaluate_functionals(const DensityTrajectory& traj, const ControlField& field,
                                      const Problem& problem, const PenaltyWeight& pw, const TargetTrack& track);

/// Tr{rho^2} = 2 p00^2 - 2 p00 + 1 + 2 |rho01|^2 for unit trace.
double purity(const DensityState& rho);

/// d Tr{rho^2} / dt = 2 g_pop (2 p00 - 1)(1 - p00) - 4 g_d |rho01|^2.
double purity_rate(const DensityState& rho, const SystemSpec& sys);

}  // namespace qoc
