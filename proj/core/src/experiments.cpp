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

#include "qoc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace qoc {

namespace {

template <class T>
std::vector<T> axis_or(const std::vector<T>& axis, T fallback) {
    return axis.empty() ? std::vector<T>{fallback} : axis;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void require_axis(const std::vector<double>& axis, const char* name, bool allow_zero) {
    for (double v : axis) {
        if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0)) {
            throw ConfigError(std::string("sweep.") + name + (allow_zero ? " values must be >= 0" : " values must be > 0"));
        }
    }
}

bool same_except_gamma_pop(const SweepPoint& a, const SweepPoint& b) {
    return a.functional == b.functional && a.gamma_d == b.gamma_d && a.f0 == b.f0 && a.a0 == b.a0;
}

void finish_point(const Scenario& scenario, PointResult& result) {
    const OptimizationRun& run = *result.run;
    result.final_purity = purity(run.trajectory.back());
    const Problem problem = problem_at(scenario, result.point);
    if (scenario.cross_functional) {
        Problem alt = problem;
        alt.target = *scenario.cross_functional == TargetKind::TypeI ? TargetSpec::type_one(problem.sys.omega10)
                                                                     : TargetSpec::type_two();
        result.cross = cross_evaluate(run.field, alt, run.a0);
    }
    if (scenario.split_time) result.split = split_at(run.report, run.field, problem, *scenario.split_time);
}

PointResult run_point(const Scenario& scenario, const SweepPoint& point) {
    PointResult result;
    result.point = point;
    try {
        const Problem problem = problem_at(scenario, point);
        const OptimizerConfig config = config_at(scenario, point);
        result.run = run_optimizer(problem, config);
        if (result.run->termination == Termination::Diverged) {
            result.failure = "diverged";
            result.failure_message = result.run->message;
        } else {
            finish_point(scenario, result);
        }
    } catch (const ConfigError& e) {
        result.failure = "config_error";
        result.failure_message = e.what();
    } catch (const PropagationDiverged& e) {
        result.failure = "diverged";
        result.failure_message = e.what();
    } catch (const std::exception& e) {
        result.failure = "internal_error";
        result.failure_message = e.what();
    }
    return result;
}

}  // namespace

void Scenario::validate() const {
    if (name.empty()) throw ConfigError("name must not be empty");
    problem.validate();
    optimizer.validate();
    require_axis(axes.gamma_d, "gamma_d", true);
    require_axis(axes.gamma_pop, "gamma_pop", true);
    require_axis(axes.f0, "f0", false);
    require_axis(axes.a0, "a0", false);
    if (!(outputs.marker_interval > 0.0)) throw ConfigError("outputs.marker_interval must be > 0");
    if (split_time && !(*split_time > 0.0 && *split_time < problem.grid.t_final())) {
        throw ConfigError("split_time must lie inside (0, t_final)");
    }
    if (baseline_gamma_pop) {
        const auto pops = axis_or(axes.gamma_pop, problem.sys.gamma_pop);
        if (std::find(pops.begin(), pops.end(), *baseline_gamma_pop) == pops.end()) {
            throw ConfigError("baseline_gamma_pop must be one of the swept gamma_pop values");
        }
    }
}

std::string SweepPoint::label() const {
    char head[16];
    std::snprintf(head, sizeof head, "p%02zu", index);
    return std::string(head) + "_" + std::string(to_string(functional)) + "_gd" + format_number(gamma_d) + "_gp" +
           format_number(gamma_pop) + "_f" + format_number(f0) + "_a" + format_number(a0);
}

std::vector<SweepPoint> expand_sweep(const Scenario& s) {
    std::vector<SweepPoint> points;
    for (TargetKind kind : axis_or(s.axes.functional, s.problem.target.kind)) {
        for (double gd : axis_or(s.axes.gamma_d, s.problem.sys.gamma_d)) {
            for (double gp : axis_or(s.axes.gamma_pop, s.problem.sys.gamma_pop)) {
                for (double f0 : axis_or(s.axes.f0, s.optimizer.f0)) {
                    for (double a0 : axis_or(s.axes.a0, s.optimizer.a0_init)) {
                        SweepPoint p;
                        p.index = points.size();
                        p.functional = kind;
                        p.gamma_d = gd;
                        p.gamma_pop = gp;
                        p.f0 = f0;
                        p.a0 = a0;
                        points.push_back(p);
                    }
                }
            }
        }
    }
    return points;
}

Problem problem_at(const Scenario& s, const SweepPoint& point) {
    Problem p = s.problem;
    p.sys.gamma_d = point.gamma_d;
    p.sys.gamma_pop = point.gamma_pop;
    if (point.functional != p.target.kind) {
        p.target = point.functional == TargetKind::TypeI ? TargetSpec::type_one(p.sys.omega10) : TargetSpec::type_two();
    }
    return p;
}

OptimizerConfig config_at(const Scenario& s, const SweepPoint& point) {
    OptimizerConfig c = s.optimizer;
    c.f0 = point.f0;
    c.a0_init = point.a0;
    return c;
}

WindowSplit split_at(const FunctionalReport& report, const ControlField& field, const Problem& problem, double cut) {
    const TimeGrid& grid = problem.grid;
    const std::vector<double> eta = sample_shape(problem.penalty(1.0), grid);
    std::vector<double> weighted(grid.size());
    for (std::size_t j = 0; j < weighted.size(); ++j) {
        weighted[j] = eta[j] < 1e-12 ? 0.0 : field.intensity(j) / eta[j];
    }
    const std::size_t c = grid.index_of(cut);
    const std::size_t last = grid.n_steps();
    WindowSplit split;
    split.cut = grid.time(c);
    split.fluence_first = trapezoid(weighted, grid.dt(), 0, c);
    split.fluence_second = trapezoid(weighted, grid.dt(), c, last);
    split.F_first = trapezoid(report.integrand, grid.dt(), 0, c);
    split.F_second = trapezoid(report.integrand, grid.dt(), c, last);
    return split;
}

std::size_t ScenarioResult::failed_points() const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const PointResult& p) {
        return p.failed();
    }));
}

ScenarioResult run_scenario(const Scenario& scenario, int jobs, const PointCallback& on_done) {
    scenario.validate();
    const std::vector<SweepPoint> points = expand_sweep(scenario);
    ScenarioResult result{scenario, std::vector<PointResult>(points.size())};
    if (points.empty()) return result;

    std::atomic<std::size_t> next{0};
    std::mutex callback_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            result.points[i] = run_point(scenario, points[i]);
            if (on_done) {
                std::lock_guard lock(callback_mutex);
                on_done(result.points[i]);
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, points.size());
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    if (scenario.baseline_gamma_pop) {
        for (PointResult& target : result.points) {
            if (target.failed()) continue;
            const auto base = std::find_if(result.points.begin(), result.points.end(), [&](const PointResult& p) {
                return !p.failed() && p.point.gamma_pop == *scenario.baseline_gamma_pop &&
                       same_except_gamma_pop(p.point, target.point);
            });
            if (base == result.points.end()) continue;
            target.baseline = cross_evaluate(base->run->field, problem_at(scenario, target.point), target.run->a0);
        }
    }
    return result;
}

FunctionalReport cross_evaluate(const ControlField& field, const Problem& problem, double a0) {
    problem.validate();
    const DensityTrajectory traj = propagate_density(DensityState::ground(), field, problem.sys, problem.grid);
    return evaluate_functionals(traj, field, problem, problem.penalty(a0));
}

PurityTrace purity_trajectory_export(const DensityTrajectory& traj, double marker_interval) {
    const TimeGrid& grid = traj.grid;
    const double t_final = grid.t_final();
    if (!(marker_interval > 0.0)) throw ConfigError("marker_interval must be > 0");
    const double count = t_final / marker_interval;
    if (std::abs(count - std::round(count)) > 1e-9 * std::max(1.0, count)) {
        throw ConfigError("marker_interval must divide t_final");
    }
    PurityTrace out;
    const std::size_t n = traj.size();
    out.time.reserve(n);
    out.p00.reserve(n);
    out.coherence.reserve(n);
    out.purity.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.time.push_back(grid.time(j));
        out.p00.push_back(traj[j].p00);
        out.coherence.push_back(std::abs(traj[j].c01));
        out.purity.push_back(purity(traj[j]));
    }
    const auto markers = static_cast<std::size_t>(std::llround(count));
    for (std::size_t m = 0; m <= markers; ++m) {
        out.markers.push_back(grid.index_of(static_cast<double>(m) * marker_interval));
    }
    return out;
}

PurityContour purity_contour(std::size_t n) {
    if (n < 2) throw ConfigError("contour resolution must be >= 2");
    PurityContour c;
    c.n = n;
    c.p00_axis.resize(n);
    c.coherence_axis.resize(n);
    const double step = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        c.p00_axis[i] = static_cast<double>(i) * step;
        c.coherence_axis[i] = 0.5 * static_cast<double>(i) * step;
    }
    c.values.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = c.p00_axis[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double r = c.coherence_axis[j];
            c.values[i * n + j] = p * p + (1.0 - p) * (1.0 - p) + 2.0 * r * r;
        }
    }
    return c;
}

std::vector<double> lab_samples(const ControlField& field, const SystemSpec& sys, const TimeGrid& grid) {
    field.validate(grid, field.frame());
    std::vector<double> out(field.x().begin(), field.x().end());
    if (field.frame() == Frame::LabExact) return out;
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double phase = sys.omega10 * grid.time(j);
        out[j] = field.x()[j] * std::cos(phase) - field.y()[j] * std::sin(phase);
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> demodulate(const ControlField& field, const SystemSpec& sys,
                                                               const TimeGrid& grid) {
    const std::size_t n = grid.size();
    if (field.frame() == Frame::RotatingRWA) {
        field.validate(grid, Frame::RotatingRWA);
        return {{field.x().begin(), field.x().end()}, {field.y().begin(), field.y().end()}};
    }
    field.validate(grid, Frame::LabExact);
    // E cos and -E sin carry Ex/2 and Ey/2 plus terms at 2 w10; a one-period
    // boxcar removes the latter.
    std::vector<double> in_phase(n), quadrature(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double phase = sys.omega10 * grid.time(j);
        in_phase[j] = 2.0 * field.x()[j] * std::cos(phase);
        quadrature[j] = -2.0 * field.x()[j] * std::sin(phase);
    }
    const double period = 2.0 * std::numbers::pi / sys.omega10;
    const auto half = static_cast<std::size_t>(std::llround(0.5 * period / grid.dt()));
    std::vector<double> cx(n + 1, 0.0), cy(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        cx[j + 1] = cx[j] + in_phase[j];
        cy[j + 1] = cy[j] + quadrature[j];
    }
    std::vector<double> ex(n), ey(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t lo = j >= half ? j - half : 0;
        const std::size_t hi = std::min(n, j + half + 1);
        const double width = static_cast<double>(hi - lo);
        ex[j] = (cx[hi] - cx[lo]) / width;
        ey[j] = (cy[hi] - cy[lo]) / width;
    }
    return {std::move(ex), std::move(ey)};
}

namespace {

Scenario base_scenario(std::string name, std::string description) {
    Scenario s;
    s.name = std::move(name);
    s.description = std::move(description);
    s.optimizer.mode = OptimizerMode::FluenceTargeted;
    s.optimizer.f0 = 0.2;
    s.optimizer.a0_init = 1.0;
    s.optimizer.max_iterations = 6000;
    return s;
}

std::vector<Scenario> make_builtins() {
    const std::vector<double> dephasing{0.0, 0.05, 0.1, 0.2, 0.5};
    std::vector<Scenario> out;

    Scenario fig1 = base_scenario("fig1", "TypeI optimal pulses at fluence 0.2 over five dephasing rates");
    fig1.axes.gamma_d = dephasing;
    out.push_back(fig1);

    Scenario fig3 = base_scenario("fig3", "TypeI target value and final purity versus dephasing at fluence 0.1, 0.2, 0.3");
    fig3.axes.gamma_d = {0.0, 0.05, 0.1, 0.2, 0.3, 0.5};
    fig3.axes.f0 = {0.1, 0.2, 0.3};
    fig3.outputs.pulses = false;
    fig3.outputs.populations = false;
    fig3.outputs.integrand = false;
    out.push_back(fig3);

    Scenario star = base_scenario("fig3-star", "Penalty-free TypeI optimization at dephasing 0.5");
    star.problem.sys.gamma_d = 0.5;
    star.optimizer.mode = OptimizerMode::PenaltyFree;
    star.optimizer.max_iterations = 20000;
    star.outputs.purity = true;
    out.push_back(star);

    Scenario fig5 = base_scenario("fig5", "TypeI at dephasing 0.2 and fluence 0.2 versus population decay");
    fig5.problem.sys.gamma_d = 0.2;
    fig5.axes.gamma_pop = {0.0, 0.025, 0.05, 0.075, 0.1};
    fig5.baseline_gamma_pop = 0.0;
    out.push_back(fig5);

    Scenario fig7 = base_scenario("fig7", "TypeII optimal pulses at fluence 0.2, also evaluated under TypeI");
    fig7.problem.target = TargetSpec::type_two();
    fig7.axes.gamma_d = dephasing;
    fig7.cross_functional = TargetKind::TypeI;
    out.push_back(fig7);

    Scenario fig9 = base_scenario("fig9", "Purity-plane trajectories of TypeI and TypeII optimal pulses");
    fig9.axes.gamma_d = dephasing;
    fig9.axes.functional = {TargetKind::TypeI, TargetKind::TypeII};
    fig9.outputs.pulses = false;
    fig9.outputs.integrand = false;
    fig9.outputs.purity = true;
    fig9.outputs.trajectories = true;
    out.push_back(fig9);

    Scenario fig10 = base_scenario("fig10", "Penalized TypeI runs over the penalty amplitude");
    fig10.optimizer.mode = OptimizerMode::Penalized;
    fig10.axes.gamma_d = dephasing;
    fig10.axes.a0 = {0.1, 0.2, 0.3, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
    fig10.outputs.pulses = false;
    fig10.outputs.populations = false;
    fig10.outputs.integrand = false;
    out.push_back(fig10);

    Scenario fig11 = base_scenario("fig11", "Fluence-targeted convergence histories for both functionals");
    fig11.axes.gamma_d = {0.0, 0.3};
    fig11.axes.functional = {TargetKind::TypeI, TargetKind::TypeII};
    fig11.outputs.pulses = false;
    fig11.outputs.populations = false;
    fig11.outputs.integrand = false;
    out.push_back(fig11);

    Scenario fig12 = base_scenario("fig12", "Two control periods at dephasing 0.5 over five fluences");
    fig12.problem.sys.gamma_d = 0.5;
    fig12.problem.window.edges = {5.0, 10.0, 15.0, 20.0};
    fig12.axes.f0 = {0.2, 0.3, 0.5, 0.7, 0.9};
    fig12.split_time = 12.5;
    out.push_back(fig12);

    return out;
}

}  // namespace

const std::vector<Scenario>& builtin_scenarios() {
    static const std::vector<Scenario> scenarios = make_builtins();
    return scenarios;
}

std::optional<Scenario> find_builtin(std::string_view name) {
    static constexpr std::pair<std::string_view, std::string_view> aliases[] = {
        {"fig2", "fig1"}, {"fig4", "fig3"}, {"fig6", "fig5"}, {"fig8", "fig7"}, {"fig13", "fig12"}};
    for (const auto& [alias, target] : aliases) {
        if (name == alias) name = target;
    }
    for (const Scenario& s : builtin_scenarios()) {
        if (s.name == name) return s;
    }
    return std::nullopt;
}

}  // namespace qoc
