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

#include "qoc/objectives.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qoc {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
    if (!(a == b)) throw GridMismatch(std::string(what) + " does not share the problem's time grid");
}

}  // namespace

std::string_view to_string(TargetKind kind) { return kind == TargetKind::TypeI ? "type1" : "type2"; }

TargetKind target_kind_from_string(std::string_view name) {
    if (name == "type1" || name == "TypeI" || name == "I") return TargetKind::TypeI;
    if (name == "type2" || name == "TypeII" || name == "II") return TargetKind::TypeII;
    throw ConfigError("unknown functional '" + std::string(name) + "' (expected 'type1' or 'type2')");
}

void ControlWindow::validate(double t_final) const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("window alpha must be a finite positive number");
    if (edges.size() % 2 != 0) throw ConfigError("window edges must come in open/close pairs");
    for (std::size_t j = 0; j < edges.size(); ++j) {
        if (!std::isfinite(edges[j])) throw ConfigError("window edges must be finite");
        if (j > 0 && !(edges[j] > edges[j - 1])) throw ConfigError("edges must be strictly increasing");
    }
    if (!edges.empty() && !(edges.front() > 0.0)) throw ConfigError("first window edge must be > 0");
    if (!edges.empty() && edges.back() > t_final) throw ConfigError("last window edge must be <= t_final");
}

void PenaltyWeight::validate() const {
    if (!(a0 > 0.0) || !std::isfinite(a0)) throw ConfigError("penalty amplitude a0 must be a finite positive number");
    if (!(ramp > 0.0) || !std::isfinite(ramp)) throw ConfigError("penalty ramp must be a finite positive number");
    if (2.0 * ramp > t_final) throw ConfigError("penalty ramps overlap: 2 * ramp > t_final");
}

double PenaltyWeight::shape_at(double t, double remaining) const {
    if (t < ramp) return t <= 0.0 ? 0.0 : std::sin(0.5 * std::numbers::pi * t / ramp);
    if (remaining < ramp) return remaining <= 0.0 ? 0.0 : std::sin(0.5 * std::numbers::pi * remaining / ramp);
    return 1.0;
}

void Problem::validate() const {
    sys.validate();
    window.validate(grid.t_final());
    penalty(1.0).validate();
    if (!std::isfinite(target.omega) || !std::isfinite(target.theta)) {
        throw ConfigError("target omega and theta must be finite");
    }
}

double window_envelope(double t, const ControlWindow& window) {
    double y = 0.0;
    for (std::size_t j = 0; j < window.edges.size(); ++j) {
        const double s = sigmoid(window.alpha * (t - window.edges[j]));
        y += (j % 2 == 0) ? s : -s;
    }
    return y;
}

double penalty_weight(double t, const PenaltyWeight& pw) { return pw.amplitude(t); }

std::vector<double> sample_window(const ControlWindow& window, const TimeGrid& grid) {
    std::vector<double> y(grid.size());
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = window_envelope(grid.time(j), window);
    return y;
}

std::vector<double> sample_shape(const PenaltyWeight& pw, const TimeGrid& grid) {
    std::vector<double> eta(grid.size());
    const std::size_t n = grid.n_steps();
    for (std::size_t j = 0; j <= n; ++j) eta[j] = pw.shape_at(grid.time(j), grid.time(n - j));
    return eta;
}

double trapezoid(std::span<const double> values, double dt, std::size_t first, std::size_t last) {
    if (last <= first) return 0.0;
    double sum = 0.5 * (values[first] + values[last]);
    for (std::size_t j = first + 1; j < last; ++j) sum += values[j];
    return sum * dt;
}

double trapezoid(std::span<const double> values, double dt) {
    return values.empty() ? 0.0 : trapezoid(values, dt, 0, values.size() - 1);
}

Op2 target_operator(double t, const TargetSpec& target, const SystemSpec& sys) {
    const double frame_shift = sys.frame == Frame::RotatingRWA ? sys.omega10 * t : 0.0;
    if (target.kind == TargetKind::TypeI) {
        const double phase = target.omega * t + target.theta - frame_shift;
        const cplx up = 0.5 * std::polar(1.0, phase);
        return {0.0, up, std::conj(up), 0.0};
    }
    return {0.0, 0.0, 2.0 * std::polar(1.0, frame_shift), 0.0};
}

cplx target_expectation(const DensityState& rho, double t, const TargetSpec& target, const SystemSpec& sys) {
    const Op2 w = target_operator(t, target, sys);
    if (target.kind == TargetKind::TypeI) return {2.0 * std::real(std::conj(w.m01) * rho.c01), 0.0};
    return std::conj(w.m10) * std::conj(rho.c01);
}

double integrand_value(cplx expectation, double y, TargetKind kind) {
    if (kind == TargetKind::TypeI) return 2.0 * y * expectation.real();
    return y * std::norm(expectation);
}

Op2 costate_source(double t, const DensityState& rho, const TargetSpec& target, const ControlWindow& window,
                   const SystemSpec& sys) {
    const double y = window_envelope(t, window);
    const Op2 w = target_operator(t, target, sys);
    if (target.kind == TargetKind::TypeI) return y * w;
    return (y * target_expectation(rho, t, target, sys)) * w;
}

TargetTrack TargetTrack::build(const Problem& problem) {
    const TimeGrid& grid = problem.grid;
    const std::size_t n = grid.n_steps();
    TargetTrack track;
    track.y_node.resize(n + 1);
    track.w_node.resize(n + 1);
    track.y_half.resize(n);
    track.w_half.resize(n);
    for (std::size_t j = 0; j <= n; ++j) {
        track.y_node[j] = window_envelope(grid.time(j), problem.window);
        track.w_node[j] = target_operator(grid.time(j), problem.target, problem.sys);
    }
    for (std::size_t j = 0; j < n; ++j) {
        track.y_half[j] = window_envelope(grid.half_time(j), problem.window);
        track.w_half[j] = target_operator(grid.half_time(j), problem.target, problem.sys);
    }
    return track;
}

SourceTrack build_source_track(const Problem& problem, const DensityTrajectory& reference,
                               const ControlField& reference_field) {
    return build_source_track(problem, TargetTrack::build(problem), reference, reference_field);
}

SourceTrack build_source_track(const Problem& problem, const TargetTrack& track, const DensityTrajectory& reference,
                               const ControlField& reference_field) {
    const TimeGrid& grid = problem.grid;
    require_same_grid(reference.grid, grid, "reference trajectory");
    if (track.y_node.size() != grid.size()) throw GridMismatch("target track does not match the time grid");
    const std::size_t n = grid.n_steps();
    std::vector<Op2> nodes(n + 1);
    std::vector<Op2> halves(n);
    if (problem.target.kind == TargetKind::TypeI) {
        for (std::size_t j = 0; j <= n; ++j) nodes[j] = track.y_node[j] * track.w_node[j];
        for (std::size_t j = 0; j < n; ++j) halves[j] = track.y_half[j] * track.w_half[j];
        return SourceTrack(std::move(nodes), std::move(halves));
    }
    reference_field.validate(grid, problem.sys.frame);
    // W y <<W|rho>>, with <<W|rho>> = conj(W10) conj(rho01) for W = w10 |1><0|.
    const auto source = [](const Op2& w, double y, const DensityState& rho) {
        return (y * std::conj(w.m10) * std::conj(rho.c01)) * w;
    };
    for (std::size_t j = 0; j <= n; ++j) nodes[j] = source(track.w_node[j], track.y_node[j], reference[j]);
    const double dt = grid.dt();
    DensityState d_prev = density_rhs(reference[0], reference_field.at(0), problem.sys);
    for (std::size_t j = 0; j < n; ++j) {
        const DensityState d_next = density_rhs(reference[j + 1], reference_field.at(j + 1), problem.sys);
        // cubic Hermite at the midpoint
        const DensityState mid = 0.5 * (reference[j] + reference[j + 1]) + (dt / 8.0) * (d_prev + (-1.0) * d_next);
        halves[j] = source(track.w_half[j], track.y_half[j], mid);
        d_prev = d_next;
    }
    return SourceTrack(std::move(nodes), std::move(halves));
}

double weighted_fluence(const ControlField& field, const TimeGrid& grid, double ramp,
                        std::size_t* endpoint_warnings) {
    const PenaltyWeight shape{1.0, ramp, grid.t_final()};
    const std::vector<double> eta = sample_shape(shape, grid);
    std::vector<double> weighted(grid.size());
    std::size_t warnings = 0;
    for (std::size_t j = 0; j < weighted.size(); ++j) {
        const double intensity = field.intensity(j);
        if (eta[j] < 1e-12) {
            if (intensity > 1e-16) ++warnings;
            weighted[j] = 0.0;
        } else {
            weighted[j] = intensity / eta[j];
        }
    }
    if (endpoint_warnings) *endpoint_warnings = warnings;
    return trapezoid(weighted, grid.dt());
}

double plain_fluence(const ControlField& field, const TimeGrid& grid) {
    std::vector<double> intensity(grid.size());
    for (std::size_t j = 0; j < intensity.size(); ++j) intensity[j] = field.intensity(j);
    return trapezoid(intensity, grid.dt());
}

FunctionalReport evaluate_functionals(const DensityTrajectory& traj, const ControlField& field,
                                      const Problem& problem, const PenaltyWeight& pw) {
    return evaluate_functionals(traj, field, problem, pw, TargetTrack::build(problem));
}

FunctionalReport evaluate_functionals(const DensityTrajectory& traj, const ControlField& field,
                                      const Problem& problem, const PenaltyWeight& pw, const TargetTrack& track) {
    const TimeGrid& grid = problem.grid;
    require_same_grid(traj.grid, grid, "trajectory");
    field.validate(grid, problem.sys.frame);
    if (track.y_node.size() != grid.size()) throw GridMismatch("target track does not match the time grid");
    FunctionalReport report;
    report.integrand.resize(grid.size());
    const bool hermitian = problem.target.kind == TargetKind::TypeI;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const Op2& w = track.w_node[j];
        const DensityState& rho = traj[j];
        const cplx e = hermitian ? cplx(2.0 * std::real(std::conj(w.m01) * rho.c01), 0.0)
                                 : std::conj(w.m10) * std::conj(rho.c01);
        report.integrand[j] = integrand_value(e, track.y_node[j], problem.target.kind);
    }
    report.F = trapezoid(report.integrand, grid.dt());
    report.f = weighted_fluence(field, grid, pw.ramp, &report.endpoint_warnings);
    report.fluence_plain = plain_fluence(field, grid);
    report.P = report.f / pw.a0;
    report.J = report.F - report.P;
    return report;
}

double purity(const DensityState& rho) {
    return rho.p00 * rho.p00 + rho.p11 * rho.p11 + 2.0 * std::norm(rho.c01);
}

double purity_rate(const DensityState& rho, const SystemSpec& sys) {
    return 2.0 * sys.gamma_pop * (2.0 * rho.p00 - 1.0) * (1.0 - rho.p00) - 4.0 * sys.gamma_d * std::norm(rho.c01);
}

}  // namespace qoc
