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

namespace qoc {

/// Penalized: fixed a0, maximize J = F - P.
/// PenaltyFree: maximize F alone by gradient ascent with an eta-shaped step.
/// FluenceTargeted: Penalized with a0 steered until the fluence equals f0.
enum class OptimizerMode { Penalized, PenaltyFree, FluenceTargeted };

enum class Termination { Converged, MaxIterations, Diverged };

std::string_view to_string(OptimizerMode mode);
OptimizerMode optimizer_mode_from_string(std::string_view name);
std::string_view to_string(Termination termination);

struct Tolerances {
    double delta_j = 1e-8;  // 0 < J_k - J_{k-1} <= delta_j (Penalized, PenaltyFree)
    double delta0 = 1e-4;   // |f - f0| / f0
    double delta1 = 1e-6;   // |f_k - f_{k-1}| / f_k
    double delta_f = 1e-8;  // 0 < F_k - F_{k-1} <= delta_f
    int streak = 30;
    /// A fluence-targeted run is only reported Converged once |f - f0| / f0
    /// is below this as well.
    double fluence_precision = 1e-10;
    /// Lower bound of the F criterion, relative to max(1, |F|). Once the
    /// iteration reaches its fixed point F_k - F_{k-1} is quadrature
    /// round-off of either sign, which counts as "not decreasing".
    double roundoff = 1e-12;
};

struct InitialGuess {
    enum class Kind { Carrier, Zero, Field };
    Kind kind = Kind::Carrier;
    /// Amplitude a of the resonant carrier a * eta(t) * (-sin(w10 t + theta)), phased
    /// so the coherence it creates lines up with the TypeI target. Unset: fluence f0 / 2.
    std::optional<double> amplitude;
    std::optional<ControlField> field;
};

struct OptimizerConfig {
    OptimizerMode mode = OptimizerMode::FluenceTargeted;
    double f0 = 0.2;
    double a0_init = 1.0;
    int max_iterations = 5000;
    /// E_new = (1 - damping) E_old + damping E_update.
    double damping = 0.3;
    /// Penalty-free step size s.
    double step = 1.0;
    int max_step_halvings = 20;
    /// Relative change bound on a0 per fluence-targeted iteration.
    double a0_max_change = 1e-3;
    /// Krotov sweeps between a0 updates in fluence-targeted mode.
    int sweeps_per_update = 1;
    /// Exponent g in a0 <- a0 (f0 / f)^(g / 2). g = 1 is the plain square-root
    /// rule, which can lock into a limit cycle with the lagging Krotov response
    /// at weak dephasing.
    double a0_gain = 0.25;
    Tolerances tol;
    InitialGuess guess;

    void validate() const;
};

struct IterationRecord {
    std::size_t k = 0;
    double F = 0.0;
    double P = 0.0;
    double J = 0.0;
    double f = 0.0;
    double a0 = 0.0;
    double step = 0.0;
    double delta0 = 0.0;
    double delta1 = 0.0;
    double delta_F = 0.0;
    double delta_J = 0.0;
    bool fluence_ok = false;
    bool change_ok = false;
    bool functional_ok = false;
    int streak = 0;
};

struct OptimizationRun {
    OptimizerConfig config;
    ControlField field;
    DensityTrajectory trajectory;
    FunctionalReport report;
    std::vector<IterationRecord> history;
    Termination termination = Termination::MaxIterations;
    std::string message;
    /// Final penalty amplitude (a0_init unless fluence-targeted).
    double a0 = 0.0;
    /// Inner sweeps per a0 update in fluence-targeted mode.
    int sweeps_per_update = 1;
};

using ProgressSink = std::function<void(const IterationRecord&)>;

/// Coupling strength c in V = -c sum_q E_q Q_q: 1 in the lab frame, 1/2 in RWA.
double coupling_weight(const SystemSpec& sys);

/// g_q = Im <<xi | [Q_q, rho]>> for each quadrature.
FieldSample coupling_gradient(const CostateState& xi, const DensityState& rho, const SystemSpec& sys);

/// Stationarity of J: E(t) = -A(t) Im <<xi(t)|M|rho(t)>>.
FieldSample field_update(const CostateState& xi, const DensityState& rho, double t, const PenaltyWeight& pw,
                         const SystemSpec& sys);

/// dJ/dE_q(t) as a density in t, assembled from the adjoint (forward rho,
/// backward xi under `field`). With `penalized` false this is dF/dE.
std::vector<FieldSample> functional_gradient(const Problem& problem, const PenaltyWeight& pw,
                                             const ControlField& field, bool penalized = true);

ControlField initial_guess(const Problem& problem, const OptimizerConfig& config);

struct SweepResult {
    ControlField field;
    DensityTrajectory trajectory;
};

/// Backward costate sweep under `previous`, then a forward sweep that sets
/// each new sample from the freshly propagated rho (self-consistent within
/// the step).
SweepResult krotov_iteration(const Problem& problem, const PenaltyWeight& pw, const ControlField& previous,
                             const DensityTrajectory& previous_trajectory, double damping = 1.0);

/// Same sweep structure with E_new = E_old - step * eta * Im<<xi|M|rho>>.
SweepResult gradient_iteration(const Problem& problem, const ControlField& previous,
                               const DensityTrajectory& previous_trajectory, double step);

OptimizationRun optimize(const Problem& problem, const OptimizerConfig& config, const ProgressSink& sink = {});
OptimizationRun penalty_free_optimize(const Problem& problem, const OptimizerConfig& config,
                                      const ProgressSink& sink = {});
OptimizationRun fluence_targeted_optimize(const Problem& problem, const OptimizerConfig& config,
                                          const ProgressSink& sink = {});

/// Dispatches on config.mode.
OptimizationRun run_optimizer(const Problem& problem, const OptimizerConfig& config, const ProgressSink& sink = {});

}  // namespace qoc
