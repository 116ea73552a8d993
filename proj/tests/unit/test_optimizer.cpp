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
#include <random>

#include "qoc/optimizer.hpp"

namespace qoc {
namespace {

double objective(const Problem& p, const PenaltyWeight& pw, const ControlField& field) {
    const auto traj = propagate_density(DensityState::ground(), field, p.sys, p.grid);
    return evaluate_functionals(traj, field, p, pw).J;
}

// Largest relative mismatch between the adjoint gradient and central
// differences of J in single samples, at 20 random interior times.
double gradient_mismatch(const Problem& p, unsigned seed) {
    OptimizerConfig cfg;
    const ControlField field = initial_guess(p, cfg);
    const PenaltyWeight pw = p.penalty(1.0);
    const auto grad = functional_gradient(p, pw, field);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(p.grid.index_of(6.0), p.grid.index_of(19.0));
    const double h = 1e-3;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t j = pick(rng);
        for (int q = 0; q < (p.sys.frame == Frame::RotatingRWA ? 2 : 1); ++q) {
            auto shifted = [&](double s) {
                ControlField f = field;
                FieldSample v = f.at(j);
                (q == 0 ? v.x : v.y) += s;
                f.set(j, v);
                return objective(p, pw, f);
            };
            const double fd = (shifted(h) - shifted(-h)) / (2.0 * h * p.grid.dt());
            auto g = [&](std::size_t i) { return q == 0 ? grad[i].x : grad[i].y; };
            // A sample moves the field by a hat function, so the difference
            // quotient sees the hat-weighted average of dJ/dE.
            const double hat = (g(j - 1) + 10.0 * g(j) + g(j + 1)) / 12.0;
            worst = std::max(worst, std::abs(fd - hat) / std::abs(hat));
        }
    }
    return worst;
}

TEST(Optimizer, GradientMatchesFiniteDifferencesTypeOne) {
    Problem p;
    p.sys.gamma_d = 0.1;
    EXPECT_LT(gradient_mismatch(p, 1), 1e-4);
}

TEST(Optimizer, GradientMatchesFiniteDifferencesTypeTwo) {
    Problem p;
    p.sys.gamma_d = 0.1;
    p.sys.gamma_pop = 0.05;
    p.target = TargetSpec::type_two();
    EXPECT_LT(gradient_mismatch(p, 2), 1e-4);
}

TEST(Optimizer, GradientMatchesFiniteDifferencesRwa) {
    Problem p;
    p.sys.gamma_d = 0.1;
    p.sys.frame = Frame::RotatingRWA;
    EXPECT_LT(gradient_mismatch(p, 3), 1e-4);
}

TEST(Optimizer, KrotovIterationsIncreaseJ) {
    Problem p;
    p.grid = TimeGrid(25.0, 6000);
    p.sys.gamma_d = 0.1;
    const PenaltyWeight pw = p.penalty(1.0);
    ControlField field = initial_guess(p, OptimizerConfig{});
    auto traj = propagate_density(DensityState::ground(), field, p.sys, p.grid);
    double previous = evaluate_functionals(traj, field, p, pw).J;
    for (int k = 0; k < 50; ++k) {
        SweepResult next = krotov_iteration(p, pw, field, traj);
        const double j = evaluate_functionals(next.trajectory, next.field, p, pw).J;
        EXPECT_GE(j, previous - 1e-12 * std::abs(previous)) << "iteration " << k + 1;
        previous = j;
        field = std::move(next.field);
        traj = std::move(next.trajectory);
    }
}

TEST(Optimizer, PenalizedHistoryIsMonotone) {
    Problem p;
    p.grid = TimeGrid(25.0, 6000);
    p.sys.gamma_d = 0.2;
    OptimizerConfig cfg;
    cfg.mode = OptimizerMode::Penalized;
    cfg.a0_init = 0.5;
    cfg.max_iterations = 50;
    const OptimizationRun run = run_optimizer(p, cfg);
    ASSERT_GE(run.history.size(), 2u);
    for (std::size_t k = 1; k < run.history.size(); ++k) {
        EXPECT_GE(run.history[k].J, run.history[k - 1].J - 1e-12);
    }
}

TEST(Optimizer, EmptyWindowDrivesFieldToZero) {
    Problem p;
    p.grid = TimeGrid(25.0, 3000);
    p.window.edges.clear();
    const ControlField field = initial_guess(p, OptimizerConfig{});
    const auto traj = propagate_density(DensityState::ground(), field, p.sys, p.grid);
    const SweepResult next = krotov_iteration(p, p.penalty(1.0), field, traj);
    for (double e : next.field.x()) EXPECT_DOUBLE_EQ(e, 0.0);
}

TEST(Optimizer, UpdateIsStationarityCondition) {
    SystemSpec sys;
    const Op2 xi{{0.1, 0.2}, {0.3, -0.1}, {0.0, 0.4}, {-0.2, 0.1}};
    const DensityState rho{0.6, 0.4, {0.1, 0.3}};
    const PenaltyWeight pw{2.0, 1.0, 25.0};
    const FieldSample g = coupling_gradient(xi, rho, sys);
    const FieldSample e = field_update(xi, rho, 12.0, pw, sys);
    EXPECT_NEAR(e.x, -2.0 * g.x, 1e-15);
    const double direct = std::imag(inner(xi, commutator(coupling_operator(sys, 0), rho.to_op())));
    EXPECT_NEAR(g.x, direct, 1e-15);
}

TEST(Optimizer, FluenceTargetingHitsTarget) {
    Problem p;
    p.grid = TimeGrid(25.0, 6000);
    p.sys.gamma_d = 0.3;
    OptimizerConfig cfg;
    cfg.max_iterations = 3000;
    const OptimizationRun run = run_optimizer(p, cfg);
    EXPECT_EQ(run.termination, Termination::Converged) << run.message;
    EXPECT_LE(std::abs(run.report.f - cfg.f0) / cfg.f0, 1e-10);
}

}  // namespace
}  // namespace qoc
