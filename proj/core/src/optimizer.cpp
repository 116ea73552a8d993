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

#include "qoc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

namespace qoc {

namespace {

constexpr int kMaxSelfConsistency = 12;

bool close_enough(FieldSample a, FieldSample b) {
    const double scale = std::max(std::abs(b.x), std::abs(b.y));
    const double diff = std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
    return diff <= 1e-300 + 4.0 * std::numeric_limits<double>::epsilon() * scale;
}

// Per-run cache: y, W and eta on the grid, plus the TypeI source track,
// which does not depend on the field.
struct SweepContext {
    const Problem& problem;
    TargetTrack track;
    std::vector<double> eta;
    std::optional<SourceTrack> fixed_source;

    explicit SweepContext(const Problem& p)
        : problem(p), track(TargetTrack::build(p)), eta(sample_shape(p.penalty(1.0), p.grid)) {
        if (p.target.kind == TargetKind::TypeI) {
            const DensityTrajectory unused{p.grid, {}};
            fixed_source = build_source_track(p, track, unused, ControlField(p.sys.frame, p.grid.size()));
        }
    }

    SourceTrack source(const DensityTrajectory& reference, const ControlField& field) const {
        if (fixed_source) return *fixed_source;
        return build_source_track(problem, track, reference, field);
    }
};

// Shared two-sweep skeleton. `update(j, old_sample, xi_j, rho_j)` returns the
// new field sample at t_j given the state propagated under the new field.
template <class Update>
SweepResult two_sweep(const SweepContext& ctx, const ControlField& previous, const DensityTrajectory& previous_traj,
                      Update&& update) {
    const Problem& problem = ctx.problem;
    const TimeGrid& grid = problem.grid;
    const SystemSpec& sys = problem.sys;
    const CostateTrajectory xi = propagate_costate(previous, sys, grid, ctx.source(previous_traj, previous));

    const std::size_t n = grid.n_steps();
    const double dt = grid.dt();
    SweepResult out{ControlField(sys.frame, grid.size()), DensityTrajectory{grid, {}}};
    out.trajectory.states.resize(grid.size());
    DensityState rho = DensityState::ground();
    out.trajectory.states[0] = rho;
    FieldSample current = update(std::size_t{0}, previous.at(0), xi[0], rho);
    out.field.set(0, current);

    for (std::size_t j = 0; j < n; ++j) {
        // predictor: the old field shifted by the change made at t_j
        const FieldSample old_j = previous.at(j), old_next = previous.at(j + 1);
        FieldSample guess{old_next.x + (current.x - old_j.x), old_next.y + (current.y - old_j.y)};
        DensityState next{};
        for (int it = 0;; ++it) {
            const FieldSample mid{0.5 * (current.x + guess.x), 0.5 * (current.y + guess.y)};
            next = rk4_density_step(rho, current, mid, guess, sys, dt);
            if (!next.is_finite()) throw PropagationDiverged(j + 1, "forward sweep");
            const FieldSample candidate = update(j + 1, old_next, xi[j + 1], next);
            if (close_enough(guess, candidate) || it + 1 == kMaxSelfConsistency) break;
            guess = candidate;
        }
        rho = next;
        current = guess;
        out.trajectory.states[j + 1] = rho;
        out.field.set(j + 1, current);
    }
    return out;
}

SweepResult krotov_sweep(const SweepContext& ctx, double a0, const ControlField& previous,
                         const DensityTrajectory& previous_trajectory, double damping) {
    const SystemSpec& sys = ctx.problem.sys;
    const std::vector<double>& eta = ctx.eta;
    return two_sweep(ctx, previous, previous_trajectory,
                     [&](std::size_t j, FieldSample old, const CostateState& xi, const DensityState& rho) {
                         const FieldSample g = coupling_gradient(xi, rho, sys);
                         const double a = a0 * eta[j];
                         const FieldSample target{-a * g.x, -a * g.y};
                         if (damping == 1.0) return target;
                         return FieldSample{(1.0 - damping) * old.x + damping * target.x,
                                            (1.0 - damping) * old.y + damping * target.y};
                     });
}

SweepResult gradient_sweep(const SweepContext& ctx, const ControlField& previous,
                           const DensityTrajectory& previous_trajectory, double step) {
    const SystemSpec& sys = ctx.problem.sys;
    const std::vector<double>& eta = ctx.eta;
    return two_sweep(ctx, previous, previous_trajectory,
                     [&](std::size_t j, FieldSample old, const CostateState& xi, const DensityState& rho) {
                         const FieldSample g = coupling_gradient(xi, rho, sys);
                         return FieldSample{old.x - step * eta[j] * g.x, old.y - step * eta[j] * g.y};
                     });
}

IterationRecord make_record(std::size_t k, const FunctionalReport& r, double a0, double step) {
    IterationRecord rec;
    rec.k = k;
    rec.F = r.F;
    rec.P = r.P;
    rec.J = r.J;
    rec.f = r.f;
    rec.a0 = a0;
    rec.step = step;
    return rec;
}

void emit(OptimizationRun& run, const IterationRecord& rec, const ProgressSink& sink) {
    run.history.push_back(rec);
    if (sink) sink(rec);
}

void require_mode(const OptimizerConfig& config, OptimizerMode mode) {
    if (config.mode != mode) {
        throw ConfigError("optimizer called with mode '" + std::string(to_string(config.mode)) + "', expected '" +
                          std::string(to_string(mode)) + "'");
    }
}

FunctionalReport penalty_free_report(const DensityTrajectory& traj, const ControlField& field,
                                     const Problem& problem, const TargetTrack& track) {
    FunctionalReport r = evaluate_functionals(traj, field, problem, problem.penalty(1.0), track);
    r.P = 0.0;
    r.J = r.F;
    return r;
}

}  // namespace

std::string_view to_string(OptimizerMode mode) {
    switch (mode) {
        case OptimizerMode::Penalized:
            return "penalized";
        case OptimizerMode::PenaltyFree:
            return "penalty_free";
        case OptimizerMode::FluenceTargeted:
            return "fluence";
    }
    return "fluence";
}

OptimizerMode optimizer_mode_from_string(std::string_view name) {
    if (name == "penalized") return OptimizerMode::Penalized;
    if (name == "penalty_free") return OptimizerMode::PenaltyFree;
    if (name == "fluence") return OptimizerMode::FluenceTargeted;
    throw ConfigError("unknown optimizer mode '" + std::string(name) +
                      "' (expected 'penalized', 'penalty_free' or 'fluence')");
}

std::string_view to_string(Termination termination) {
    switch (termination) {
        case Termination::Converged:
            return "converged";
        case Termination::MaxIterations:
            return "max_iterations";
        case Termination::Diverged:
            return "diverged";
    }
    return "diverged";
}

void OptimizerConfig::validate() const {
    if (mode == OptimizerMode::FluenceTargeted && !(f0 > 0.0)) throw ConfigError("f0 must be > 0 in fluence mode");
    if (!(a0_init > 0.0) || !std::isfinite(a0_init)) throw ConfigError("a0 must be a finite positive number");
    if (max_iterations <= 0) throw ConfigError("max_iterations must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("step must be a finite positive number");
    if (max_step_halvings < 0) throw ConfigError("max_step_halvings must be >= 0");
    if (!(a0_max_change > 0.0)) throw ConfigError("a0_max_change must be positive");
    if (sweeps_per_update <= 0) throw ConfigError("sweeps_per_update must be positive");
    if (!(a0_gain > 0.0 && a0_gain <= 1.0)) throw ConfigError("a0_gain must lie in (0, 1]");
    if (!(tol.delta_j > 0.0 && tol.delta0 > 0.0 && tol.delta1 > 0.0 && tol.delta_f > 0.0 &&
          tol.fluence_precision > 0.0 && tol.roundoff >= 0.0) ||
        tol.streak <= 0) {
        throw ConfigError("tolerances must be positive");
    }
    if (guess.amplitude && !std::isfinite(*guess.amplitude)) throw ConfigError("initial amplitude must be finite");
    if (guess.kind == InitialGuess::Kind::Field && !guess.field) {
        throw ConfigError("initial guess kind 'field' needs a field");
    }
}

double coupling_weight(const SystemSpec& sys) { return sys.frame == Frame::LabExact ? 1.0 : 0.5; }

FieldSample coupling_gradient(const CostateState& xi, const DensityState& rho, const SystemSpec& sys) {
    // [sigma_x, rho] = [[-2i Im c, -dp], [dp, 2i Im c]] and
    // [Q_y / mu, rho] = [[2i Re c, -i dp], [-i dp, -2i Re c]], dp = p00 - p11.
    const double dp = rho.p00 - rho.p11;
    const cplx diag_conj = std::conj(xi.m00) - std::conj(xi.m11);
    const cplx off_diff = std::conj(xi.m01) - std::conj(xi.m10);
    const cplx off_sum = std::conj(xi.m01) + std::conj(xi.m10);
    const double im_c = rho.c01.imag();
    const double re_c = rho.c01.real();
    const double gx = sys.mu01 * std::imag(cplx(0.0, -2.0 * im_c) * diag_conj - dp * off_diff);
    if (sys.frame == Frame::LabExact) return {gx, 0.0};
    const double gy = sys.mu01 * std::imag(cplx(0.0, 2.0 * re_c) * diag_conj + cplx(0.0, -dp) * off_sum);
    return {gx, gy};
}

FieldSample field_update(const CostateState& xi, const DensityState& rho, double t, const PenaltyWeight& pw,
                         const SystemSpec& sys) {
    const double a = pw.amplitude(t);
    const FieldSample g = coupling_gradient(xi, rho, sys);
    return {-a * g.x, -a * g.y};
}

std::vector<FieldSample> functional_gradient(const Problem& problem, const PenaltyWeight& pw,
                                             const ControlField& field, bool penalized) {
    const TimeGrid& grid = problem.grid;
    const DensityTrajectory traj = propagate_density(DensityState::ground(), field, problem.sys, grid);
    const CostateTrajectory xi =
        propagate_costate(field, problem.sys, grid, build_source_track(problem, traj, field));
    const double c = coupling_weight(problem.sys);
    const std::vector<double> eta = sample_shape(pw, grid);
    std::vector<FieldSample> grad(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const FieldSample g = coupling_gradient(xi[j], traj[j], problem.sys);
        FieldSample e = field.at(j);
        double inv_a = 0.0;
        if (penalized && eta[j] >= 1e-12) inv_a = 1.0 / (pw.a0 * eta[j]);
        grad[j] = {-2.0 * c * (g.x + e.x * inv_a), -2.0 * c * (g.y + e.y * inv_a)};
    }
    return grad;
}

ControlField initial_guess(const Problem& problem, const OptimizerConfig& config) {
    const TimeGrid& grid = problem.grid;
    const SystemSpec& sys = problem.sys;
    switch (config.guess.kind) {
        case InitialGuess::Kind::Zero:
            return ControlField(sys.frame, grid.size());
        case InitialGuess::Kind::Field:
            config.guess.field->validate(grid, sys.frame);
            return *config.guess.field;
        case InitialGuess::Kind::Carrier:
            break;
    }
    // Resonant carrier whose first-order coherence from |0> has the phase of
    // the TypeI target: rho01 ~ exp(i (omega10 t + theta)).
    const double theta = problem.target.kind == TargetKind::TypeI ? problem.target.theta : 0.0;
    const std::vector<double> eta = sample_shape(problem.penalty(1.0), grid);
    ControlField unit(sys.frame, grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (sys.frame == Frame::LabExact) {
            unit.set(j, {-eta[j] * std::sin(sys.omega10 * grid.time(j) + theta), 0.0});
        } else {
            unit.set(j, {-eta[j] * std::sin(theta), eta[j] * std::cos(theta)});
        }
    }
    double amplitude = 0.0;
    if (config.guess.amplitude) {
        amplitude = *config.guess.amplitude;
    } else {
        const double unit_fluence = weighted_fluence(unit, grid, problem.ramp);
        amplitude = std::sqrt(0.5 * config.f0 / unit_fluence);
    }
    ControlField guess(sys.frame, grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const FieldSample u = unit.at(j);
        guess.set(j, {amplitude * u.x, amplitude * u.y});
    }
    return guess;
}

SweepResult krotov_iteration(const Problem& problem, const PenaltyWeight& pw, const ControlField& previous,
                             const DensityTrajectory& previous_trajectory, double damping) {
    if (!(problem.grid == previous_trajectory.grid)) throw GridMismatch("previous trajectory is on another grid");
    const SweepContext ctx(problem);
    return krotov_sweep(ctx, pw.a0, previous, previous_trajectory, damping);
}

SweepResult gradient_iteration(const Problem& problem, const ControlField& previous,
                               const DensityTrajectory& previous_trajectory, double step) {
    if (!(problem.grid == previous_trajectory.grid)) throw GridMismatch("previous trajectory is on another grid");
    const SweepContext ctx(problem);
    return gradient_sweep(ctx, previous, previous_trajectory, step);
}

OptimizationRun optimize(const Problem& problem, const OptimizerConfig& config, const ProgressSink& sink) {
    require_mode(config, OptimizerMode::Penalized);
    problem.validate();
    config.validate();
    const PenaltyWeight pw = problem.penalty(config.a0_init);
    const SweepContext ctx(problem);

    OptimizationRun run;
    run.config = config;
    run.a0 = config.a0_init;
    run.field = initial_guess(problem, config);
    run.trajectory = propagate_density(DensityState::ground(), run.field, problem.sys, problem.grid);
    run.report = evaluate_functionals(run.trajectory, run.field, problem, pw, ctx.track);
    emit(run, make_record(0, run.report, pw.a0, 0.0), sink);

    for (int k = 1; k <= config.max_iterations; ++k) {
        SweepResult next;
        try {
            next = krotov_sweep(ctx, pw.a0, run.field, run.trajectory, config.damping);
        } catch (const PropagationDiverged& e) {
            run.termination = Termination::Diverged;
            run.message = e.what();
            return run;
        }
        FunctionalReport report = evaluate_functionals(next.trajectory, next.field, problem, pw, ctx.track);
        if (!std::isfinite(report.J)) {
            run.termination = Termination::Diverged;
            run.message = "functional is not finite at iteration " + std::to_string(k);
            return run;
        }
        IterationRecord rec = make_record(static_cast<std::size_t>(k), report, pw.a0, 0.0);
        rec.delta_J = report.J - run.report.J;
        rec.delta_F = report.F - run.report.F;
        rec.functional_ok = rec.delta_J > 0.0 && rec.delta_J <= config.tol.delta_j;
        rec.streak = rec.functional_ok ? 1 : 0;
        run.field = std::move(next.field);
        run.trajectory = std::move(next.trajectory);
        run.report = std::move(report);
        emit(run, rec, sink);
        if (rec.functional_ok) {
            run.termination = Termination::Converged;
            return run;
        }
    }
    run.termination = Termination::MaxIterations;
    run.message = "no convergence within " + std::to_string(config.max_iterations) + " iterations";
    return run;
}

OptimizationRun penalty_free_optimize(const Problem& problem, const OptimizerConfig& config,
                                      const ProgressSink& sink) {
    require_mode(config, OptimizerMode::PenaltyFree);
    problem.validate();
    config.validate();

    const SweepContext ctx(problem);

    OptimizationRun run;
    run.config = config;
    run.a0 = 0.0;
    run.field = initial_guess(problem, config);
    run.trajectory = propagate_density(DensityState::ground(), run.field, problem.sys, problem.grid);
    run.report = penalty_free_report(run.trajectory, run.field, problem, ctx.track);
    double step = config.step;
    emit(run, make_record(0, run.report, 0.0, step), sink);

    for (int k = 1; k <= config.max_iterations; ++k) {
        SweepResult next;
        FunctionalReport report;
        bool improved = false;
        for (int halvings = 0; halvings <= config.max_step_halvings; ++halvings) {
            try {
                next = gradient_sweep(ctx, run.field, run.trajectory, step);
                report = penalty_free_report(next.trajectory, next.field, problem, ctx.track);
                improved = std::isfinite(report.F) && report.F > run.report.F;
            } catch (const PropagationDiverged&) {
                improved = false;
            }
            if (improved) break;
            step *= 0.5;
        }
        if (!improved) {
            // Either converged to round-off or the step collapsed.
            run.termination = Termination::MaxIterations;
            run.message = "objective stopped increasing after " + std::to_string(config.max_step_halvings) +
                          " step halvings at iteration " + std::to_string(k);
            return run;
        }
        IterationRecord rec = make_record(static_cast<std::size_t>(k), report, 0.0, step);
        rec.delta_F = report.F - run.report.F;
        rec.delta_J = rec.delta_F;
        rec.functional_ok = rec.delta_J > 0.0 && rec.delta_J <= config.tol.delta_j;
        rec.streak = rec.functional_ok ? 1 : 0;
        run.field = std::move(next.field);
        run.trajectory = std::move(next.trajectory);
        run.report = std::move(report);
        emit(run, rec, sink);
        if (rec.functional_ok) {
            run.termination = Termination::Converged;
            return run;
        }
    }
    run.termination = Termination::MaxIterations;
    run.message = "no convergence within " + std::to_string(config.max_iterations) + " iterations";
    return run;
}

OptimizationRun fluence_targeted_optimize(const Problem& problem, const OptimizerConfig& config,
                                          const ProgressSink& sink) {
    require_mode(config, OptimizerMode::FluenceTargeted);
    problem.validate();
    config.validate();
    const Tolerances& tol = config.tol;
    const double f0 = config.f0;

    const SweepContext ctx(problem);

    OptimizationRun run;
    run.config = config;
    run.sweeps_per_update = config.sweeps_per_update;
    double a0 = config.a0_init;
    run.field = initial_guess(problem, config);
    run.trajectory = propagate_density(DensityState::ground(), run.field, problem.sys, problem.grid);
    run.report = evaluate_functionals(run.trajectory, run.field, problem, problem.penalty(a0), ctx.track);
    {
        IterationRecord rec = make_record(0, run.report, a0, 0.0);
        rec.delta0 = (run.report.f - f0) / f0;
        emit(run, rec, sink);
    }

    int streak = 0;
    for (int k = 1; k <= config.max_iterations; ++k) {
        const PenaltyWeight pw = problem.penalty(a0);
        SweepResult next;
        try {
            next = krotov_sweep(ctx, a0, run.field, run.trajectory, config.damping);
        } catch (const PropagationDiverged& e) {
            run.termination = Termination::Diverged;
            run.message = e.what();
            run.a0 = a0;
            return run;
        }
        FunctionalReport report = evaluate_functionals(next.trajectory, next.field, problem, pw, ctx.track);
        if (!std::isfinite(report.J) || !(report.f > 0.0)) {
            run.termination = Termination::Diverged;
            run.message = "fluence or functional degenerate at iteration " + std::to_string(k);
            run.a0 = a0;
            return run;
        }
        IterationRecord rec = make_record(static_cast<std::size_t>(k), report, a0, 0.0);
        rec.delta0 = (report.f - f0) / f0;
        rec.delta1 = (report.f - run.report.f) / report.f;
        rec.delta_F = report.F - run.report.F;
        rec.delta_J = report.J - run.report.J;
        rec.fluence_ok = std::abs(rec.delta0) <= tol.delta0;
        rec.change_ok = std::abs(rec.delta1) <= tol.delta1;
        const double floor = tol.roundoff * std::max(1.0, std::abs(report.F));
        rec.functional_ok = rec.delta_F > -floor && rec.delta_F <= tol.delta_f;
        // delta1 has no predecessor on the first sweep, so it never counts.
        const bool all_ok = k > 1 && rec.fluence_ok && rec.change_ok && rec.functional_ok;
        streak = all_ok ? streak + 1 : 0;
        rec.streak = streak;

        run.field = std::move(next.field);
        run.trajectory = std::move(next.trajectory);
        run.report = std::move(report);
        run.a0 = a0;
        emit(run, rec, sink);

        if (streak >= tol.streak && std::abs(rec.delta0) <= tol.fluence_precision) {
            run.termination = Termination::Converged;
            return run;
        }
        if (k % config.sweeps_per_update != 0) continue;
        const double ratio = std::pow(f0 / run.report.f, 0.5 * config.a0_gain);
        a0 *= std::clamp(ratio, 1.0 - config.a0_max_change, 1.0 + config.a0_max_change);
    }
    run.termination = Termination::MaxIterations;
    run.message = "no convergence within " + std::to_string(config.max_iterations) + " iterations";
    return run;
}

OptimizationRun run_optimizer(const Problem& problem, const OptimizerConfig& config, const ProgressSink& sink) {
    switch (config.mode) {
        case OptimizerMode::Penalized:
            return optimize(problem, config, sink);
        case OptimizerMode::PenaltyFree:
            return penalty_free_optimize(problem, config, sink);
        case OptimizerMode::FluenceTargeted:
            return fluence_targeted_optimize(problem, config, sink);
    }
    throw ConfigError("unknown optimizer mode");
}

}  // namespace qoc
