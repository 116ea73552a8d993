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
#include <benchmark/benchmark.h>

#include <cmath>

#include "qoc/optimizer.hpp"

namespace qoc {
namespace {

Problem problem_for(Frame frame, TargetKind kind) {
    Problem p;
    p.sys.frame = frame;
    p.sys.gamma_d = 0.1;
    p.target = kind == TargetKind::TypeI ? TargetSpec::type_one(p.sys.omega10) : TargetSpec::type_two();
    return p;
}

void BM_PropagateDensity(benchmark::State& state) {
    const Problem p = problem_for(static_cast<Frame>(state.range(0)), TargetKind::TypeI);
    const ControlField field = initial_guess(p, OptimizerConfig{});
    for (auto _ : state) {
        benchmark::DoNotOptimize(propagate_density(DensityState::ground(), field, p.sys, p.grid));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.grid.n_steps()));
}
BENCHMARK(BM_PropagateDensity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PropagateCostate(benchmark::State& state) {
    const Problem p = problem_for(Frame::LabExact, static_cast<TargetKind>(state.range(0)));
    const ControlField field = initial_guess(p, OptimizerConfig{});
    const auto traj = propagate_density(DensityState::ground(), field, p.sys, p.grid);
    const SourceTrack source = build_source_track(p, traj, field);
    for (auto _ : state) benchmark::DoNotOptimize(propagate_costate(field, p.sys, p.grid, source));
}
BENCHMARK(BM_PropagateCostate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_KrotovIteration(benchmark::State& state) {
    const Problem p = problem_for(Frame::LabExact, static_cast<TargetKind>(state.range(0)));
    const ControlField field = initial_guess(p, OptimizerConfig{});
    const auto traj = propagate_density(DensityState::ground(), field, p.sys, p.grid);
    for (auto _ : state) benchmark::DoNotOptimize(krotov_iteration(p, p.penalty(1.0), field, traj, 0.3));
}
BENCHMARK(BM_KrotovIteration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EvaluateFunctionals(benchmark::State& state) {
    const Problem p = problem_for(Frame::LabExact, TargetKind::TypeI);
    const ControlField field = initial_guess(p, OptimizerConfig{});
    const auto traj = propagate_density(DensityState::ground(), field, p.sys, p.grid);
    const TargetTrack track = TargetTrack::build(p);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_functionals(traj, field, p, p.penalty(1.0), track));
}
BENCHMARK(BM_EvaluateFunctionals)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace qoc

BENCHMARK_MAIN();
