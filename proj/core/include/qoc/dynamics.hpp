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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qoc/errors.hpp"
#include "qoc/linalg.hpp"

namespace qoc {

/// LabExact: one real field, full Hamiltonian H0 - mu E(t).
/// RotatingRWA: resonant rotating frame, two quadrature envelopes; a lab
/// field E(t) = Ex(t) cos(w10 t) - Ey(t) sin(w10 t) maps onto it.
enum class Frame { LabExact, RotatingRWA };

std::string_view to_string(Frame frame);
Frame frame_from_string(std::string_view name);

/// Dimensionless two-level system (hbar = 1, ground energy 0).
struct SystemSpec {
    double omega10 = 30.0;
    double mu01 = 1.0;
    double gamma_d = 0.0;
    double gamma_pop = 0.0;
    Frame frame = Frame::LabExact;

    void validate() const;
    /// Complete positivity needs gamma_d >= gamma_pop / 2. Not enforced.
    std::optional<std::string> physicality_warning() const;
};

/// Uniform grid t_j = j * dt, j = 0..n_steps.
class TimeGrid {
  public:
    /// 25 time units split into 30000 steps.
    TimeGrid() : TimeGrid(25.0, 30000) {}
    TimeGrid(double t_final, std::size_t n_steps);

    double t_final() const noexcept { return t_final_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t size() const noexcept { return n_steps_ + 1; }
    double dt() const noexcept { return t_final_ / static_cast<double>(n_steps_); }
    double time(std::size_t j) const noexcept { return static_cast<double>(j) * dt(); }
    double half_time(std::size_t j) const noexcept { return (static_cast<double>(j) + 0.5) * dt(); }
    /// Nearest grid index to t, clamped to the grid.
    std::size_t index_of(double t) const noexcept;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

  private:
    double t_final_;
    std::size_t n_steps_;
};

/// Qubit density matrix. Hermiticity is structural: only rho01 is stored.
/// The same type doubles as the (traceless) tangent in the integrator.
struct DensityState {
    double p00 = 1.0;
    double p11 = 0.0;
    cplx c01{};

    static constexpr DensityState ground() { return {1.0, 0.0, {}}; }
    static constexpr DensityState maximally_mixed() { return {0.5, 0.5, {}}; }
    static DensityState from_op(const Op2& rho);

    Op2 to_op() const { return {p00, c01, std::conj(c01), p11}; }
    double trace() const { return p00 + p11; }
    bool is_finite() const;

    DensityState& operator+=(const DensityState& o) {
        p00 += o.p00;
        p11 += o.p11;
        c01 += o.c01;
        return *this;
    }
    friend DensityState operator+(DensityState a, const DensityState& b) { return a += b; }
    friend DensityState operator*(double s, const DensityState& a) { return {s * a.p00, s * a.p11, s * a.c01}; }
    friend bool operator==(const DensityState&, const DensityState&) = default;
};

/// Lagrange-multiplier operator. Not Hermitian in general (type II sources).
using CostateState = Op2;

/// One field value: lab mode uses x only, RWA mode uses both quadratures.
struct FieldSample {
    double x = 0.0;
    double y = 0.0;
};

/// Field sampled on a TimeGrid; between samples it is linear.
class ControlField {
  public:
    ControlField() = default;
    ControlField(Frame frame, std::size_t n_samples);

    static ControlField lab(std::vector<double> samples);
    static ControlField rwa(std::vector<double> x, std::vector<double> y);

    Frame frame() const noexcept { return frame_; }
    std::size_t size() const noexcept { return x_.size(); }

    FieldSample at(std::size_t j) const {
        return {x_[j], frame_ == Frame::RotatingRWA ? y_[j] : 0.0};
    }
    /// Linear interpolation at t_j + dt/2.
    FieldSample midpoint(std::size_t j) const {
        const FieldSample a = at(j), b = at(j + 1);
        return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    }
    void set(std::size_t j, FieldSample s) {
        x_[j] = s.x;
        if (frame_ == Frame::RotatingRWA) y_[j] = s.y;
    }

    std::span<const double> x() const noexcept { return x_; }
    std::span<const double> y() const noexcept { return y_; }

    /// Squared amplitude used for fluence bookkeeping: E^2 in lab mode,
    /// (Ex^2 + Ey^2) / 2 in RWA mode (cycle-averaged lab-equivalent).
    double intensity(std::size_t j) const;

    /// Throws GridMismatch on a sample-count mismatch, ConfigError on a
    /// non-finite sample or a frame that disagrees with `frame`.
    void validate(const TimeGrid& grid, Frame frame) const;

    friend bool operator==(const ControlField&, const ControlField&) = default;

  private:
    Frame frame_ = Frame::LabExact;
    std::vector<double> x_;
    std::vector<double> y_;
};

template <class State>
struct Trajectory {
    TimeGrid grid;
    std::vector<State> states;

    const State& operator[](std::size_t j) const { return states[j]; }
    const State& back() const { return states.back(); }
    std::size_t size() const noexcept { return states.size(); }
};

using DensityTrajectory = Trajectory<DensityState>;
using CostateTrajectory = Trajectory<CostateState>;

/// Inhomogeneity of the costate equation, sampled at grid nodes and at the
/// half steps RK4 needs.
class SourceTrack {
  public:
    SourceTrack(std::vector<Op2> nodes, std::vector<Op2> halves);
    /// Half-step values by linear interpolation of the nodes.
    static SourceTrack from_nodes(std::vector<Op2> nodes);
    static SourceTrack zero(const TimeGrid& grid);

    const Op2& node(std::size_t j) const { return nodes_[j]; }
    const Op2& half(std::size_t j) const { return halves_[j]; }
    std::size_t size() const noexcept { return nodes_.size(); }

  private:
    std::vector<Op2> nodes_;
    std::vector<Op2> halves_;
};

/// Full Hamiltonian in the propagation frame.
Op2 hamiltonian(const SystemSpec& sys, FieldSample field);

/// Field-coupling operator Q of quadrature q (0 = x, 1 = y); the interaction
/// is -E Q (lab) or -(1/2) sum_q E_q Q_q (RWA).
Op2 coupling_operator(const SystemSpec& sys, int quadrature);

/// Gamma rho: decays population 1 -> 0 at gamma_pop and damps coherence at
/// gamma_d. Enters the equation of motion as -Gamma rho. Traceless.
Op2 relaxation_apply(const Op2& rho, const SystemSpec& sys);

/// Gamma^dagger xi under <<A|B>> = Tr{A^dagger B}.
Op2 relaxation_adjoint_apply(const Op2& xi, const SystemSpec& sys);

/// d rho / dt = -i [H, rho] - Gamma rho.
DensityState density_rhs(const DensityState& rho, FieldSample field, const SystemSpec& sys);

/// d xi / dt = -i [H, xi] + Gamma^dagger xi - source.
Op2 costate_rhs(const Op2& xi, FieldSample field, const SystemSpec& sys, const Op2& source);

/// One classical RK4 step of length dt with the field at start, midpoint and end.
DensityState rk4_density_step(const DensityState& rho, FieldSample start, FieldSample mid, FieldSample end,
                              const SystemSpec& sys, double dt);

/// One RK4 step of length -dt, from t_{j+1} (`end`) back to t_j (`start`).
Op2 rk4_costate_step_back(const Op2& xi, FieldSample end, FieldSample mid, FieldSample start, const Op2& src_end,
                          const Op2& src_mid, const Op2& src_start, const SystemSpec& sys, double dt);

/// Forward propagation from rho0 under `field`. Throws PropagationDiverged.
DensityTrajectory propagate_density(const DensityState& rho0, const ControlField& field, const SystemSpec& sys,
                                    const TimeGrid& grid);

/// Backward propagation from xi(t_f) = final_value (zero for every
/// optimization sweep). Throws PropagationDiverged.
CostateTrajectory propagate_costate(const ControlField& field, const SystemSpec& sys, const TimeGrid& grid,
                                    const SourceTrack& source, const Op2& final_value = Op2::zero());

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// R = Tr{rho sigma}, with sigma_z |0> = +|0>.
BlochVector bloch_vector(const DensityState& rho);

}  // namespace qoc
