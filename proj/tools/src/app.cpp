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

#include "qoc/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qoc/version.hpp"

namespace qoc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

std::string summary_csv(const ScenarioResult& result) {
    std::string out =
        "index,label,functional,gamma_d,gamma_pop,f0,a0_init,a0_final,termination,iterations,F,P,J,fluence,"
        "fluence_plain,final_purity,cross_F,baseline_F,fluence_first,fluence_second,F_first,F_second,failure\n";
    for (const PointResult& p : result.points) {
        const SweepPoint& pt = p.point;
        std::vector<std::string> cells{std::to_string(pt.index),       pt.label(),
                                       std::string(to_string(pt.functional)), format_double(pt.gamma_d),
                                       format_double(pt.gamma_pop),   format_double(pt.f0),
                                       format_double(pt.a0)};
        if (p.run) {
            const OptimizationRun& run = *p.run;
            cells.push_back(format_double(run.a0));
            cells.emplace_back(to_string(run.termination));
            cells.push_back(std::to_string(run.history.empty() ? 0 : run.history.back().k));
            cells.push_back(format_double(run.report.F));
            cells.push_back(format_double(run.report.P));
            cells.push_back(format_double(run.report.J));
            cells.push_back(format_double(run.report.f));
            cells.push_back(format_double(run.report.fluence_plain));
            cells.push_back(p.failed() ? std::string{} : format_double(p.final_purity));
        } else {
            cells.insert(cells.end(), 9, std::string{});
        }
        cells.push_back(optional_cell(p.cross ? std::optional<double>(p.cross->F) : std::nullopt));
        cells.push_back(optional_cell(p.baseline ? std::optional<double>(p.baseline->F) : std::nullopt));
        if (p.split) {
            cells.push_back(format_double(p.split->fluence_first));
            cells.push_back(format_double(p.split->fluence_second));
            cells.push_back(format_double(p.split->F_first));
            cells.push_back(format_double(p.split->F_second));
        } else {
            cells.insert(cells.end(), 4, std::string{});
        }
        cells.push_back(p.failure);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    }
    return out;
}

fs::path default_out(const std::string& name) {
    const char* root = std::getenv("QOC_DEFAULT_OUT");
    return fs::path(root && *root ? root : "qoc-out") / name;
}

Scenario load_scenario(const RunConfig& rc) {
    Scenario s;
    if (!rc.config_path.empty()) {
        s = parse_config(read_file(rc.config_path));
    } else if (!rc.scenario.empty()) {
        auto found = find_builtin(rc.scenario);
        if (!found) throw ConfigError("scenario: unknown built-in scenario '" + rc.scenario + "'");
        s = *found;
    } else {
        throw ConfigError("scenario: give a built-in name or --config <file>");
    }
    for (const auto& [name, value] : rc.tolerances) apply_tolerance(s, name, value);
    s.validate();
    return s;
}

json base_manifest(const std::string& command) {
    return {{"tool", "qoc"}, {"version", kVersion}, {"command", command}};
}

struct Subcommand {
    RunConfig rc;
    std::vector<std::string> tolerance_args;
};

void add_common(CLI::App& cmd, Subcommand& sc, bool scenario_positional) {
    if (scenario_positional) cmd.add_option("name", sc.rc.scenario, "Built-in scenario name");
    cmd.add_option("--scenario", sc.rc.scenario, "Built-in scenario name");
    cmd.add_option("--config", sc.rc.config_path, "Scenario JSON file");
    cmd.add_option("--out", sc.rc.out, "Output directory (default $QOC_DEFAULT_OUT/<name>)");
    cmd.add_option("--jobs", sc.rc.jobs, "Sweep points run in parallel")->check(CLI::PositiveNumber);
    cmd.add_flag("--force", sc.rc.force, "Replace an existing completed output directory");
    cmd.add_option("--tolerance", sc.tolerance_args, "Tolerance override name=value (repeatable)");
    cmd.add_option("--seed", sc.rc.seed, "Reserved; all algorithms are deterministic");
}

void resolve_tolerances(Subcommand& sc) {
    for (const std::string& arg : sc.tolerance_args) {
        auto [name, value] = parse_tolerance_arg(arg);
        sc.rc.tolerances[name] = value;
    }
}

int finish_scenario(const Scenario& s, const RunConfig& rc, const std::string& command, std::ostream& out,
                    std::ostream& err) {
    const fs::path target = rc.out.empty() ? default_out(s.name) : rc.out;
    OutputDirectory dir(target, rc.force);
    const ScenarioResult result = run_scenario(s, rc.jobs, [&](const PointResult& p) {
        if (p.failed()) {
            err << p.point.label() << ": " << p.failure << ": " << p.failure_message << std::endl;
        } else {
            out << p.point.label() << ": " << to_string(p.run->termination) << " F=" << format_double(p.run->report.F)
                << " fluence=" << format_double(p.run->report.f) << std::endl;
        }
    });
    write_scenario_outputs(result, dir, command);
    out << "wrote " << dir.target().string() << "\n";
    return result.failed_points() == 0 ? kExitOk : kExitFailedPoint;
}

void write_trajectory_tables(OutputDirectory& dir, const std::string& prefix, const DensityTrajectory& traj,
                             const ControlField& field, const SystemSpec& sys, std::span<const double> integrand,
                             const OutputSelection& sel) {
    if (sel.pulses) dir.write(prefix + "pulse.csv", pulse_csv(field, sys, traj.grid));
    if (sel.populations) dir.write(prefix + "populations.csv", populations_csv(traj));
    if (sel.integrand) dir.write(prefix + "integrand.csv", integrand_csv(traj.grid, integrand));
    if (sel.purity) dir.write(prefix + "purity.csv", purity_csv(purity_trajectory_export(traj, sel.marker_interval)));
    if (sel.bloch) dir.write(prefix + "bloch.csv", bloch_csv(traj));
    if (sel.trajectories) dir.write(prefix + "trajectory.csv", trajectory_csv(traj));
}

json report_json(const FunctionalReport& r) {
    return {{"F", r.F},
            {"P", r.P},
            {"J", r.J},
            {"fluence", r.f},
            {"fluence_plain", r.fluence_plain},
            {"endpoint_warnings", r.endpoint_warnings}};
}

int cmd_run(Subcommand& sc, const std::string& command, std::ostream& out, std::ostream& err,
            const SweepAxes* overrides) {
    resolve_tolerances(sc);
    Scenario s = load_scenario(sc.rc);
    if (overrides) {
        if (!overrides->gamma_d.empty()) s.axes.gamma_d = overrides->gamma_d;
        if (!overrides->gamma_pop.empty()) s.axes.gamma_pop = overrides->gamma_pop;
        if (!overrides->f0.empty()) s.axes.f0 = overrides->f0;
        if (!overrides->a0.empty()) s.axes.a0 = overrides->a0;
        if (!overrides->functional.empty()) s.axes.functional = overrides->functional;
        s.validate();
    }
    return finish_scenario(s, sc.rc, command, out, err);
}

Problem problem_for_field(const Subcommand& sc, const FieldFile& file) {
    Problem p;
    if (!sc.rc.config_path.empty() || !sc.rc.scenario.empty()) p = load_scenario(sc.rc).problem;
    p.sys = file.sys;
    p.grid = file.grid;
    p.ramp = file.ramp;
    if (p.target.kind == TargetKind::TypeI) p.target.omega = p.sys.omega10;
    return p;
}

int cmd_evaluate(Subcommand& sc, const fs::path& field_path, const std::string& functional,
                 const std::optional<double>& a0, std::ostream& out) {
    resolve_tolerances(sc);
    const FieldFile file = read_field_json(read_file(field_path));
    Problem p = problem_for_field(sc, file);
    if (!functional.empty()) {
        const TargetKind kind = target_kind_from_string(functional);
        p.target = kind == TargetKind::TypeI ? TargetSpec::type_one(p.sys.omega10) : TargetSpec::type_two();
    }
    const double amplitude = a0.value_or(file.a0);
    if (!(amplitude > 0.0)) throw ConfigError("a0: must be > 0");
    const FunctionalReport report = cross_evaluate(file.field, p, amplitude);
    json doc = base_manifest("evaluate");
    doc["functional"] = std::string(to_string(p.target.kind));
    doc["a0"] = amplitude;
    doc["report"] = report_json(report);
    doc["final_purity"] = purity(propagate_density(DensityState::ground(), file.field, p.sys, p.grid).back());
    if (!sc.rc.out.empty()) {
        OutputDirectory dir(sc.rc.out, sc.rc.force);
        dir.write("integrand.csv", integrand_csv(p.grid, report.integrand));
        dir.commit(doc);
    }
    out << doc.dump(2) << "\n";
    return kExitOk;
}

int cmd_propagate(Subcommand& sc, const std::string& field_arg, std::ostream& out) {
    resolve_tolerances(sc);
    FieldFile file;
    std::string name = "propagate";
    if (field_arg == "zero") {
        Problem p;
        if (!sc.rc.config_path.empty() || !sc.rc.scenario.empty()) p = load_scenario(sc.rc).problem;
        file.sys = p.sys;
        file.grid = p.grid;
        file.ramp = p.ramp;
        file.field = p.sys.frame == Frame::LabExact ? ControlField::lab(std::vector<double>(p.grid.size(), 0.0))
                                                    : ControlField::rwa(std::vector<double>(p.grid.size(), 0.0),
                                                                        std::vector<double>(p.grid.size(), 0.0));
        name = "propagate-zero";
    } else {
        file = read_field_json(read_file(field_arg));
    }
    const Problem p = problem_for_field(sc, file);
    const DensityTrajectory traj = propagate_density(DensityState::ground(), file.field, p.sys, p.grid);
    const FunctionalReport report = evaluate_functionals(traj, file.field, p, p.penalty(file.a0));

    const fs::path target = sc.rc.out.empty() ? default_out(name) : sc.rc.out;
    OutputDirectory dir(target, sc.rc.force);
    OutputSelection sel;
    sel.purity = true;
    sel.bloch = true;
    sel.trajectories = true;
    write_trajectory_tables(dir, "", traj, file.field, p.sys, report.integrand, sel);
    json doc = base_manifest("propagate");
    doc["functional"] = std::string(to_string(p.target.kind));
    doc["report"] = report_json(report);
    doc["final_purity"] = purity(traj.back());
    dir.commit(doc);
    out << "wrote " << dir.target().string() << "\n";
    return kExitOk;
}

int cmd_list(std::ostream& out) {
    for (const Scenario& s : builtin_scenarios()) {
        out << s.name << "  (" << expand_sweep(s).size() << " points)  " << s.description << "\n";
    }
    out << "aliases: fig2=fig1 fig4=fig3 fig6=fig5 fig8=fig7 fig13=fig12\n";
    return kExitOk;
}

}  // namespace

json point_summary(const PointResult& p) {
    const SweepPoint& pt = p.point;
    json doc = {{"index", pt.index},
                {"label", pt.label()},
                {"functional", std::string(to_string(pt.functional))},
                {"gamma_d", pt.gamma_d},
                {"gamma_pop", pt.gamma_pop},
                {"f0", pt.f0},
                {"a0_init", pt.a0},
                {"status", p.failed() ? p.failure : std::string("ok")}};
    if (p.failed()) doc["message"] = p.failure_message;
    if (p.run) {
        const OptimizationRun& run = *p.run;
        doc["termination"] = std::string(to_string(run.termination));
        doc["iterations"] = run.history.empty() ? 0 : run.history.back().k;
        doc["a0_final"] = run.a0;
        doc["sweeps_per_update"] = run.sweeps_per_update;
        doc["report"] = report_json(run.report);
        if (!p.failed()) doc["final_purity"] = p.final_purity;
    }
    doc["cross_F"] = optional_number(p.cross ? std::optional<double>(p.cross->F) : std::nullopt);
    doc["baseline_F"] = optional_number(p.baseline ? std::optional<double>(p.baseline->F) : std::nullopt);
    if (p.split) {
        doc["split"] = {{"cut", p.split->cut},
                        {"fluence_first", p.split->fluence_first},
                        {"fluence_second", p.split->fluence_second},
                        {"F_first", p.split->F_first},
                        {"F_second", p.split->F_second}};
    }
    return doc;
}

void write_scenario_outputs(const ScenarioResult& result, OutputDirectory& dir, const std::string& command) {
    const Scenario& s = result.scenario;
    dir.write("summary.csv", summary_csv(result));
    if (s.outputs.purity) dir.write("contour.csv", contour_csv(purity_contour()));
    json points = json::array();
    for (const PointResult& p : result.points) {
        points.push_back(point_summary(p));
        if (!p.run) continue;
        const OptimizationRun& run = *p.run;
        const Problem problem = problem_at(s, p.point);
        const std::string prefix = "points/" + p.point.label() + "/";
        dir.write(prefix + "field.json",
                  write_field_json({run.field, problem.grid, problem.sys, run.a0 > 0.0 ? run.a0 : 1.0, problem.ramp}));
        dir.write(prefix + "history.csv", history_csv(run.history));
        write_trajectory_tables(dir, prefix, run.trajectory, run.field, problem.sys, run.report.integrand, s.outputs);
    }
    json manifest = base_manifest(command);
    manifest["scenario"] = to_json(s);
    manifest["points"] = std::move(points);
    manifest["failed_points"] = result.failed_points();
    dir.commit(std::move(manifest));
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal control pulses for a dissipative qubit", "qoc"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Subcommand run_sc, sweep_sc, eval_sc, prop_sc;
    CLI::App* run = app.add_subcommand("run", "Run a built-in or configured scenario");
    add_common(*run, run_sc, true);

    SweepAxes axes;
    std::vector<std::string> functional_names;
    CLI::App* sweep = app.add_subcommand("sweep", "Run a scenario with sweep axes replaced from the command line");
    add_common(*sweep, sweep_sc, true);
    sweep->add_option("--gamma-d", axes.gamma_d, "Dephasing rates");
    sweep->add_option("--gamma-pop", axes.gamma_pop, "Population decay rates");
    sweep->add_option("--f0", axes.f0, "Target fluences");
    sweep->add_option("--a0", axes.a0, "Penalty amplitudes (initial values in fluence mode)");
    sweep->add_option("--functional", functional_names, "type1 and/or type2");

    fs::path field_path;
    std::string functional;
    std::optional<double> eval_a0;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a stored field under a functional");
    add_common(*evaluate, eval_sc, false);
    evaluate->add_option("--field", field_path, "Field file written by run")->required();
    evaluate->add_option("--functional", functional, "type1 or type2 (default: scenario target)");
    evaluate->add_option("--a0", eval_a0, "Penalty amplitude for P (default: from the field file)");

    std::string prop_field;
    CLI::App* propagate = app.add_subcommand("propagate", "Propagate a stored field without optimizing");
    add_common(*propagate, prop_sc, false);
    propagate->add_option("--field", prop_field, "Field file, or 'zero'")->required();

    CLI::App* list = app.add_subcommand("list-scenarios", "List built-in scenarios");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (run->parsed()) return cmd_run(run_sc, "run", out, err, nullptr);
        if (sweep->parsed()) {
            for (const std::string& n : functional_names) axes.functional.push_back(target_kind_from_string(n));
            return cmd_run(sweep_sc, "sweep", out, err, &axes);
        }
        if (evaluate->parsed()) return cmd_evaluate(eval_sc, field_path, functional, eval_a0, out);
        if (propagate->parsed()) return cmd_propagate(prop_sc, prop_field, out);
        if (list->parsed()) return cmd_list(out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const OutputExists& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}

}  // namespace qoc::cli
