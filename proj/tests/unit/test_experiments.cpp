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
#include <set>

#include "qoc/errors.hpp"
#include "qoc/experiments.hpp"

namespace qoc {
namespace {

TEST(Experiments, ContourCorners) {
    const PurityContour c = purity_contour(201);
    EXPECT_DOUBLE_EQ(c.at(100, 200), 1.0);  // rho00 = 0.5, |rho01| = 0.5
    EXPECT_DOUBLE_EQ(c.at(100, 0), 0.5);
    EXPECT_DOUBLE_EQ(c.at(200, 0), 1.0);
    EXPECT_DOUBLE_EQ(c.at(0, 0), 1.0);
    EXPECT_THROW(purity_contour(1), ConfigError);
}

TEST(Experiments, PurityTraceStartsAtGround) {
    Problem p;
    p.grid = TimeGrid(25.0, 1000);
    const auto traj = propagate_density(DensityState::ground(), ControlField::lab(std::vector<double>(1001, 0.0)),
                                        p.sys, p.grid);
    const PurityTrace trace = purity_trajectory_export(traj, 2.5);
    EXPECT_DOUBLE_EQ(trace.p00.front(), 1.0);
    EXPECT_DOUBLE_EQ(trace.coherence.front(), 0.0);
    EXPECT_DOUBLE_EQ(trace.purity.front(), 1.0);
    EXPECT_EQ(trace.markers.size(), 11u);
    EXPECT_EQ(trace.markers.back(), 1000u);
    EXPECT_THROW(purity_trajectory_export(traj, 2.4), ConfigError);
}

TEST(Experiments, ExpandSweepOrderAndLabels) {
    Scenario s = *find_builtin("fig11");
    const auto points = expand_sweep(s);
    ASSERT_EQ(points.size(), 4u);
    EXPECT_EQ(points[0].functional, TargetKind::TypeI);
    EXPECT_DOUBLE_EQ(points[1].gamma_d, 0.3);
    EXPECT_EQ(points[2].functional, TargetKind::TypeII);
    std::set<std::string> labels;
    for (const auto& p : points) labels.insert(p.label());
    EXPECT_EQ(labels.size(), points.size());
    EXPECT_EQ(points[0].label(), "p00_type1_gd0_gp0_f0.2_a1");
}

TEST(Experiments, PointProblemCarriesAxes) {
    const Scenario s = *find_builtin("fig5");
    const auto points = expand_sweep(s);
    const Problem p = problem_at(s, points[3]);
    EXPECT_DOUBLE_EQ(p.sys.gamma_pop, 0.075);
    EXPECT_DOUBLE_EQ(p.sys.gamma_d, 0.2);
    EXPECT_DOUBLE_EQ(config_at(s, points[3]).f0, 0.2);
}

TEST(Experiments, BuiltinsValidateAndAliasesResolve) {
    for (const Scenario& s : builtin_scenarios()) EXPECT_NO_THROW(s.validate()) << s.name;
    EXPECT_EQ(find_builtin("fig2")->name, "fig1");
    EXPECT_EQ(find_builtin("fig13")->name, "fig12");
    EXPECT_FALSE(find_builtin("fig99").has_value());
    EXPECT_EQ(expand_sweep(*find_builtin("fig3")).size(), 18u);
    EXPECT_EQ(expand_sweep(*find_builtin("fig10")).size(), 45u);
}

TEST(Experiments, SplitAddsUp) {
    Problem p;
    p.grid = TimeGrid(25.0, 5000);
    p.window.edges = {5.0, 10.0, 15.0, 20.0};
    std::vector<double> e(p.grid.size());
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = 0.1 * std::cos(p.sys.omega10 * p.grid.time(j));
    const auto field = ControlField::lab(e);
    const auto traj = propagate_density(DensityState::ground(), field, p.sys, p.grid);
    const auto report = evaluate_functionals(traj, field, p, p.penalty(1.0));
    const WindowSplit split = split_at(report, field, p, 12.5);
    EXPECT_NEAR(split.fluence_first + split.fluence_second, report.f, 1e-12);
    EXPECT_NEAR(split.F_first + split.F_second, report.F, 1e-12);
}

TEST(Experiments, DemodulationRecoversEnvelope) {
    SystemSpec sys;
    sys.frame = Frame::RotatingRWA;
    const TimeGrid grid(25.0, 30000);
    std::vector<double> x(grid.size()), y(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        x[j] = 0.2 + 0.01 * grid.time(j);
        y[j] = -0.1;
    }
    const auto [ex, ey] = demodulate(ControlField::rwa(x, y), sys, grid);
    const std::size_t mid = grid.index_of(12.5);
    EXPECT_NEAR(ex[mid], x[mid], 1e-4);
    EXPECT_NEAR(ey[mid], y[mid], 1e-4);
}

TEST(Experiments, CrossEvaluationMatchesDirectEvaluation) {
    Problem p;
    p.grid = TimeGrid(25.0, 3000);
    p.sys.gamma_d = 0.1;
    const ControlField field = initial_guess(p, OptimizerConfig{});
    p.target = TargetSpec::type_two();
    const auto traj = propagate_density(DensityState::ground(), field, p.sys, p.grid);
    EXPECT_DOUBLE_EQ(cross_evaluate(field, p).F, evaluate_functionals(traj, field, p, p.penalty(1.0)).F);
}

TEST(Experiments, FailedPointIsReportedNotThrown) {
    Scenario s = *find_builtin("fig1");
    s.problem.grid = TimeGrid(25.0, 600);
    s.axes.gamma_d = {0.1};
    s.optimizer.max_iterations = 3;
    s.optimizer.guess.amplitude = 1e200;
    const ScenarioResult r = run_scenario(s, 1);
    ASSERT_EQ(r.points.size(), 1u);
    ASSERT_TRUE(r.points[0].failed());
    EXPECT_EQ(r.points[0].failure, "diverged");
}

}  // namespace
}  // namespace qoc
