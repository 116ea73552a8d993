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

#include "qoc/dynamics.hpp"

#include <cmath>
#include <utility>

namespace qoc {

namespace {

// Hermitian H = [[h00, h01], [conj(h01), h11]].
struct Hermitian2 {
    double h00;
    double h11;
    cplx h01;
};

Hermitian2 hamiltonian_elements(const SystemSpec& sys, FieldSample f) {
    if (sys.frame == Frame::LabExact) return {0.0, sys.omega10, cplx(-sys.mu01 * f.x, 0.0)};
    return {0.0, 0.0, -0.5 * sys.mu01 * cplx(f.x, f.y)};
}

}  // namespace

std::string_view to_string(Frame frame) {
    switch (frame) {
        case Frame::LabExact:
            return "lab";
        case Frame::RotatingRWA:
            return "rwa";
    }
    return "lab";
}

Frame frame_from_string(std::string_view name) {
    if (name == "lab" || name == "LabExact") return Frame::LabExact;
    if (name == "rwa" || name == "RotatingRWA") return Frame::RotatingRWA;
    throw ConfigError("unknown frame '" + std::string(name) + "' (expected 'lab' or 'rwa')");
}

void SystemSpec::validate() const {
    if (!(omega10 > 0.0) || !std::isfinite(omega10)) throw ConfigError("omega10 must be a finite positive number");
    if (!std::isfinite(mu01)) throw ConfigError("mu01 must be finite");
    if (!(gamma_d >= 0.0) || !std::isfinite(gamma_d)) throw ConfigError("gamma_d must be >= 0");
    if (!(gamma_pop >= 0.0) || !std::isfinite(gamma_pop)) throw ConfigError("gamma_pop must be >= 0");
}

std::optional<std::string> SystemSpec::physicality_warning() const {
    if (gamma_d < 0.5 * gamma_pop) {
        return "gamma_d = " + std::to_string(gamma_d) + " < gamma_pop / 2 = " + std::to_string(0.5 * gamma_pop) +
               ": relaxation is not completely positive";
    }
    return std::nullopt;
}

TimeGrid::TimeGrid(double t_final, std::size_t n_steps) : t_final_(t_final), n_steps_(n_steps) {
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be a finite positive number");
    if (n_steps == 0 || n_steps % 2 != 0) throw ConfigError("n_steps must be a positive even integer");
}

std::size_t TimeGrid::index_of(double t) const noexcept {
    const double r = std::round(t / dt());
    if (!(r > 0.0)) return 0;
    if (r >= static_cast<double>(n_steps_)) return n_steps_;
    return static_cast<std::size_t>(r);
}

DensityState DensityState::from_op(const Op2& rho) {
    return {rho.m00.real(), rho.m11.real(), 0.5 * (rho.m01 + std::conj(rho.m10))};
}

bool DensityState::is_finite() const {
    return std::isfinite(p00) && std::isfinite(p11) && std::isfinite(c01.real()) && std::isfinite(c01.imag());
}

ControlField::ControlField(Frame frame, std::size_t n_samples)
    : frame_(frame), x_(n_samples, 0.0), y_(frame == Frame::RotatingRWA ? n_samples : 0, 0.0) {}

ControlField ControlField::lab(std::vector<double> samples) {
    ControlField f;
    f.frame_ = Frame::LabExact;
    f.x_ = std::move(samples);
    return f;
}

ControlField ControlField::rwa(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size()) throw GridMismatch("RWA quadrature tracks differ in length");
    ControlField f;
    f.frame_ = Frame::RotatingRWA;
    f.x_ = std::move(x);
    f.y_ = std::move(y);
    return f;
}

double ControlField::intensity(std::size_t j) const {
    if (frame_ == Frame::LabExact) return x_[j] * x_[j];
    return 0.5 * (x_[j] * x_[j] + y_[j] * y_[j]);
}

void ControlField::validate(const TimeGrid& grid, Frame frame) const {
    if (frame != frame_) {
        throw ConfigError("field frame '" + std::string(to_string(frame_)) + "' does not match system frame '" +
                          std::string(to_string(frame)) + "'");
    }
    if (x_.size() != grid.size()) {
        throw GridMismatch("field has " + std::to_string(x_.size()) + " samples, grid has " +
                           std::to_string(grid.size()));
    }
    for (std::size_t j = 0; j < x_.size(); ++j) {
        if (!std::isfinite(x_[j]) || (frame_ == Frame::RotatingRWA && !std::isfinite(y_[j]))) {
            throw ConfigError("field sample " + std::to_string(j) + " is not finite");
        }
    }
}

SourceTrack::SourceTrack(std::vector<Op2> nodes, std::vector<Op2> halves)
    : nodes_(std::move(nodes)), halves_(std::move(halves)) {
    if (nodes_.empty() || halves_.size() + 1 != nodes_.size()) {
        throw GridMismatch("source track needs n+1 node samples and n half-step samples");
    }
}

SourceTrack SourceTrack::from_nodes(std::vector<Op2> nodes) {
    if (nodes.size() < 2) throw GridMismatch("source track needs at least two samples");
    std::vector<Op2> halves(nodes.size() - 1);
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) halves[j] = 0.5 * (nodes[j] + nodes[j + 1]);
    return SourceTrack(std::move(nodes), std::move(halves));
}

SourceTrack SourceTrack::zero(const TimeGrid& grid) {
    return SourceTrack(std::vector<Op2>(grid.size()), std::vector<Op2>(grid.n_steps()));
}

Op2 hamiltonian(const SystemSpec& sys, FieldSample field) {
    const Hermitian2 h = hamiltonian_elements(sys, field);
    return {h.h00, h.h01, std::conj(h.h01), h.h11};
}

Op2 coupling_operator(const SystemSpec& sys, int quadrature) {
    const double mu = sys.mu01;
    if (quadrature == 0) return {0.0, mu, mu, 0.0};
    if (quadrature == 1 && sys.frame == Frame::RotatingRWA) return {0.0, cplx(0.0, mu), cplx(0.0, -mu), 0.0};
    throw ConfigError("no coupling operator for quadrature " + std::to_string(quadrature) + " in frame " +
                      std::string(to_string(sys.frame)));
}

Op2 relaxation_apply(const Op2& rho, const SystemSpec& sys) {
    const cplx decay = sys.gamma_pop * rho.m11;
    return {-decay, sys.gamma_d * rho.m01, sys.gamma_d * rho.m10, decay};
}

Op2 relaxation_adjoint_apply(const Op2& xi, const SystemSpec& sys) {
    return {0.0, sys.gamma_d * xi.m01, sys.gamma_d * xi.m10, sys.gamma_pop * (xi.m11 - xi.m00)};
}

DensityState density_rhs(const DensityState& rho, FieldSample field, const SystemSpec& sys) {
    const Hermitian2 h = hamiltonian_elements(sys, field);
    const cplx c = rho.c01;
    // -i[H, rho]_00 = 2 Im(h01 conj(c)); the 11 element is its negative.
    const double d00 = 2.0 * std::imag(h.h01 * std::conj(c)) + sys.gamma_pop * rho.p11;
    const cplx d01 = cplx(0.0, -(h.h00 - h.h11)) * c - kI * h.h01 * (rho.p11 - rho.p00) - sys.gamma_d * c;
    return {d00, -d00, d01};
}

Op2 costate_rhs(const Op2& xi, FieldSample field, const SystemSpec& sys, const Op2& source) {
    const Hermitian2 h = hamiltonian_elements(sys, field);
    const cplx h10 = std::conj(h.h01);
    const double split = h.h00 - h.h11;
    // [H, xi] written out for Hermitian H
    const cplx c00 = h.h01 * xi.m10 - xi.m01 * h10;
    const cplx c01 = split * xi.m01 + h.h01 * (xi.m11 - xi.m00);
    const cplx c10 = -split * xi.m10 + h10 * (xi.m00 - xi.m11);
    const cplx minus_i{0.0, -1.0};
    const Op2 relax = relaxation_adjoint_apply(xi, sys);
    return {minus_i * c00 + relax.m00 - source.m00, minus_i * c01 + relax.m01 - source.m01,
            minus_i * c10 + relax.m10 - source.m10, -(minus_i * c00) + relax.m11 - source.m11};
}

DensityState rk4_density_step(const DensityState& rho, FieldSample start, FieldSample mid, FieldSample end,
                              const SystemSpec& sys, double dt) {
    const double half = 0.5 * dt;
    const DensityState k1 = density_rhs(rho, start, sys);
    const DensityState k2 = density_rhs(rho + half * k1, mid, sys);
    const DensityState k3 = density_rhs(rho + half * k2, mid, sys);
    const DensityState k4 = density_rhs(rho + dt * k3, end, sys);
    return rho + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
}

Op2 rk4_costate_step_back(const Op2& xi, FieldSample end, FieldSample mid, FieldSample start, const Op2& src_end,
                          const Op2& src_mid, const Op2& src_start, const SystemSpec& sys, double dt) {
    const double h = -dt;
    const Op2 k1 = costate_rhs(xi, end, sys, src_end);
    const Op2 k2 = costate_rhs(xi + (0.5 * h) * k1, mid, sys, src_mid);
    const Op2 k3 = costate_rhs(xi + (0.5 * h) * k2, mid, sys, src_mid);
    const Op2 k4 = costate_rhs(xi + h * k3, start, sys, src_start);
    return xi + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
}

DensityTrajectory propagate_density(const DensityState& rho0, const ControlField& field, const SystemSpec& sys,
                                    const TimeGrid& grid) {
    field.validate(grid, sys.frame);
    if (!rho0.is_finite() || std::abs(rho0.trace() - 1.0) > 1e-9) {
        throw ConfigError("initial density matrix must be finite with unit trace");
    }
    DensityTrajectory traj{grid, {}};
    traj.states.resize(grid.size());
    traj.states[0] = rho0;
    const double dt = grid.dt();
    for (std::size_t j = 0; j < grid.n_steps(); ++j) {
        const DensityState next =
            rk4_density_step(traj.states[j], field.at(j), field.midpoint(j), field.at(j + 1), sys, dt);
        if (!next.is_finite()) throw PropagationDiverged(j + 1, "density propagation");
        traj.states[j + 1] = next;
    }
    return traj;
}

CostateTrajectory propagate_costate(const ControlField& field, const SystemSpec& sys, const TimeGrid& grid,
                                    const SourceTrack& source, const Op2& final_value) {
    field.validate(grid, sys.frame);
    if (source.size() != grid.size()) throw GridMismatch("source track does not match the time grid");
    CostateTrajectory traj{grid, {}};
    traj.states.resize(grid.size());
    const std::size_t n = grid.n_steps();
    traj.states[n] = final_value;
    const double dt = grid.dt();
    for (std::size_t j = n; j-- > 0;) {
        const Op2 prev = rk4_costate_step_back(traj.states[j + 1], field.at(j + 1), field.midpoint(j), field.at(j),
                                               source.node(j + 1), source.half(j), source.node(j), sys, dt);
        if (!prev.is_finite()) throw PropagationDiverged(j, "costate propagation");
        traj.states[j] = prev;
    }
    return traj;
}

BlochVector bloch_vector(const DensityState& rho) {
    return {2.0 * rho.c01.real(), -2.0 * rho.c01.imag(), rho.p00 - rho.p11};
}

}  // namespace qoc
