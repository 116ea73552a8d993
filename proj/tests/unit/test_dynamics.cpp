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
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qoc/dynamics.hpp"
#include "qoc/errors.hpp"
#include "qoc/objectives.hpp"

namespace qoc {
namespace {

Op2 random_op(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    return {{n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}};
}

DensityState random_density(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double p = u(rng);
    const double r = std::sqrt(p * (1.0 - p)) * u(rng);
    const double phi = 2.0 * std::numbers::pi * u(rng);
    return {p, 1.0 - p, std::polar(r, phi)};
}

SystemSpec random_system(std::mt19937_64& rng, Frame frame) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SystemSpec sys;
    sys.omega10 = 10.0 + 40.0 * u(rng);
    sys.mu01 = 0.5 + u(rng);
    sys.gamma_pop = 0.2 * u(rng);
    sys.gamma_d = 0.1 + 0.5 * u(rng);
    sys.frame = frame;
    return sys;
}

DensityTrajectory free_run(const SystemSpec& sys, const TimeGrid& grid, const DensityState& rho0) {
    return propagate_density(rho0, ControlField::lab(std::vector<double>(grid.size(), 0.0)), sys, grid);
}

TEST(Dynamics, FreeCoherenceDecay) {
    SystemSpec sys;
    sys.gamma_d = 0.3;
    const TimeGrid grid(25.0, 30000);
    const DensityState plus{0.5, 0.5, {0.5, 0.0}};
    const auto traj = free_run(sys, grid, plus);
    double modulus = 0.0, value = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.time(j);
        const cplx exact = 0.5 * std::exp(cplx(-sys.gamma_d, sys.omega10) * t);
        modulus = std::max(modulus, std::abs(std::abs(traj[j].c01) - std::abs(exact)));
        value = std::max(value, std::abs(traj[j].c01 - exact));
    }
    EXPECT_LT(modulus, 1e-8);
    EXPECT_NEAR(std::abs(traj.back().c01), 0.5 * std::exp(-7.5), 1e-8);
    // The carrier phase lags by about T omega^5 dt^4 / 120.
    EXPECT_LT(value, 1e-6);
}

TEST(Dynamics, FourthOrderConvergence) {
    SystemSpec sys;
    sys.gamma_d = 0.3;
    const DensityState plus{0.5, 0.5, {0.5, 0.0}};
    const cplx exact = 0.5 * std::exp(cplx(-sys.gamma_d, sys.omega10) * 25.0);
    const double coarse = std::abs(free_run(sys, TimeGrid(25.0, 7500), plus).back().c01 - exact);
    const double fine = std::abs(free_run(sys, TimeGrid(25.0, 15000), plus).back().c01 - exact);
    EXPECT_GE(coarse / fine, 12.0);
}

TEST(Dynamics, FreePopulationDecay) {
    SystemSpec sys;
    sys.gamma_pop = 0.1;
    sys.gamma_d = 0.05;
    const TimeGrid grid(25.0, 30000);
    const DensityState excited{0.0, 1.0, {}};
    const auto traj = free_run(sys, grid, excited);
    EXPECT_NEAR(traj.back().p11, std::exp(-sys.gamma_pop * 25.0), 1e-10);
    EXPECT_NEAR(traj.back().trace(), 1.0, 1e-12);
}

TEST(Dynamics, RwaPiPulseInverts) {
    SystemSpec sys;
    sys.frame = Frame::RotatingRWA;
    const TimeGrid grid(25.0, 30000);
    const double amp = std::numbers::pi / (sys.mu01 * grid.t_final());
    const auto field = ControlField::rwa(std::vector<double>(grid.size(), amp), std::vector<double>(grid.size(), 0.0));
    const auto traj = propagate_density(DensityState::ground(), field, sys, grid);
    EXPECT_NEAR(traj.back().p11, 1.0, 1e-9);
}

TEST(Dynamics, LabPiPulseInverts) {
    SystemSpec sys;
    const TimeGrid grid(25.0, 30000);
    const double amp = std::numbers::pi / (sys.mu01 * grid.t_final());
    std::vector<double> e(grid.size());
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = amp * std::cos(sys.omega10 * grid.time(j));
    const auto traj = propagate_density(DensityState::ground(), ControlField::lab(e), sys, grid);
    EXPECT_NEAR(traj.back().p11, 1.0, 2e-3);
}

TEST(Dynamics, UnitaryEvolutionKeepsPurityAndTrace) {
    SystemSpec sys;
    const TimeGrid grid(25.0, 30000);
    std::vector<double> e(grid.size());
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = 0.3 * std::sin(sys.omega10 * grid.time(j) + 0.2);
    const auto traj = propagate_density(DensityState::ground(), ControlField::lab(e), sys, grid);
    for (std::size_t j = 0; j < traj.size(); j += 250) {
        EXPECT_NEAR(purity(traj[j]), 1.0, 1e-7);  // RK4 loses about (omega dt)^6 / 144 per step
        EXPECT_LE(purity(traj[j]), 1.0 + 1e-12);
        EXPECT_NEAR(traj[j].trace(), 1.0, 1e-12);
    }
}

TEST(Dynamics, PairingIdentityHoldsPointwise) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n;
    for (Frame frame : {Frame::LabExact, Frame::RotatingRWA}) {
        for (int k = 0; k < 100; ++k) {
            const SystemSpec sys = random_system(rng, frame);
            const Op2 xi = random_op(rng);
            const Op2 src = random_op(rng);
            const DensityState rho = random_density(rng);
            const FieldSample f{n(rng), n(rng)};
            // d/dt <<xi|rho>> = -<<src|rho>> whatever H and Gamma are.
            const cplx lhs = inner(costate_rhs(xi, f, sys, src), rho.to_op()) +
                             inner(xi, density_rhs(rho, f, sys).to_op());
            EXPECT_LT(std::abs(lhs + inner(src, rho.to_op())), 1e-12);
        }
    }
}

TEST(Dynamics, RelaxationAdjoint) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
        const SystemSpec sys = random_system(rng, Frame::LabExact);
        const Op2 a = random_op(rng);
        const Op2 b = random_op(rng);
        const cplx lhs = inner(a, relaxation_apply(b, sys));
        const cplx rhs = inner(relaxation_adjoint_apply(a, sys), b);
        EXPECT_LT(std::abs(lhs - rhs), 1e-12);
    }
}

TEST(Dynamics, BackwardCostateReversesForwardPairing) {
    // With a zero source <<xi(t)|rho(t)>> is conserved, so the discrete
    // sweeps must agree to integrator accuracy.
    SystemSpec sys;
    sys.gamma_d = 0.2;
    sys.gamma_pop = 0.05;
    const TimeGrid grid(5.0, 6000);
    std::vector<double> e(grid.size());
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = 0.4 * std::cos(sys.omega10 * grid.time(j));
    const auto field = ControlField::lab(e);
    const auto rho = propagate_density(DensityState::ground(), field, sys, grid);
    const Op2 final{{0.3, 0.1}, {0.2, -0.4}, {-0.1, 0.5}, {0.7, 0.0}};
    const auto xi = propagate_costate(field, sys, grid, SourceTrack::zero(grid), final);
    const cplx end = inner(xi.back(), rho.back().to_op());
    const cplx start = inner(xi[0], rho[0].to_op());
    EXPECT_LT(std::abs(end - start), 1e-9);
}

TEST(Dynamics, BlochVectorOfGroundState) {
    const BlochVector b = bloch_vector(DensityState::ground());
    EXPECT_DOUBLE_EQ(b.z, 1.0);
    EXPECT_DOUBLE_EQ(b.x, 0.0);
}

TEST(Dynamics, RejectsMismatchedField) {
    SystemSpec sys;
    const TimeGrid grid(25.0, 100);
    EXPECT_THROW(propagate_density(DensityState::ground(), ControlField::lab(std::vector<double>(50, 0.0)), sys, grid),
                 GridMismatch);
}

TEST(Dynamics, RejectsNegativeRates) {
    SystemSpec sys;
    sys.gamma_d = -0.1;
    EXPECT_THROW(sys.validate(), ConfigError);
}

}  // namespace
}  // namespace qoc
