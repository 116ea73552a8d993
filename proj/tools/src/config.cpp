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

#include "qoc/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

namespace qoc::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what); }

std::string join(const std::string& parent, std::string_view key) {
    return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

/// View of one JSON object that rejects unknown keys up front.
class Section {
  public:
    Section(const json& node, std::string path, std::initializer_list<std::string_view> allowed)
        : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
        for (const auto& [key, value] : node_.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(join(path_, key), "unknown key");
            }
        }
    }

    bool has(std::string_view key) const { return node_.contains(std::string(key)); }
    const json& at(std::string_view key) const { return node_.at(std::string(key)); }
    std::string key(std::string_view k) const { return join(path_, k); }

    std::optional<double> number(std::string_view k) const {
        if (!has(k)) return std::nullopt;
        const json& v = at(k);
        if (!v.is_number()) fail(key(k), "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(key(k), "must be finite");
        return d;
    }
    std::optional<double> positive(std::string_view k) const {
        auto v = number(k);
        if (v && !(*v > 0.0)) fail(key(k), "must be > 0");
        return v;
    }
    std::optional<double> non_negative(std::string_view k) const {
        auto v = number(k);
        if (v && !(*v >= 0.0)) fail(key(k), "must be >= 0");
        return v;
    }
    std::optional<long long> integer(std::string_view k, long long min) const {
        if (!has(k)) return std::nullopt;
        const json& v = at(k);
        if (!v.is_number_integer()) fail(key(k), "must be an integer");
        const long long i = v.get<long long>();
        if (i < min) fail(key(k), "must be >= " + std::to_string(min));
        return i;
    }
    std::optional<bool> boolean(std::string_view k) const {
        if (!has(k)) return std::nullopt;
        if (!at(k).is_boolean()) fail(key(k), "must be true or false");
        return at(k).get<bool>();
    }
    std::optional<std::string> string(std::string_view k) const {
        if (!has(k)) return std::nullopt;
        if (!at(k).is_string()) fail(key(k), "must be a string");
        return at(k).get<std::string>();
    }
    std::optional<std::vector<double>> numbers(std::string_view k) const {
        if (!has(k)) return std::nullopt;
        const json& v = at(k);
        if (!v.is_array()) fail(key(k), "must be an array of numbers");
        std::vector<double> out;
        for (const json& e : v) {
            if (!e.is_number() || !std::isfinite(e.get<double>())) fail(key(k), "must be an array of finite numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

  private:
    const json& node_;
    std::string path_;
};

/// Re-throws library validation errors with the owning key prefixed.
template <class F>
void checked(const std::string& key, F&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        fail(key, e.what());
    }
}

void read_system(const Section& root, SystemSpec& sys) {
    if (!root.has("system")) return;
    const Section s(root.at("system"), "system", {"omega10", "mu01", "gamma_d", "gamma_pop", "frame"});
    if (auto v = s.positive("omega10")) sys.omega10 = *v;
    if (auto v = s.number("mu01")) sys.mu01 = *v;
    if (auto v = s.non_negative("gamma_d")) sys.gamma_d = *v;
    if (auto v = s.non_negative("gamma_pop")) sys.gamma_pop = *v;
    if (auto v = s.string("frame")) checked(s.key("frame"), [&] { sys.frame = frame_from_string(*v); });
}

void read_grid(const Section& root, Problem& p) {
    if (!root.has("grid")) return;
    const Section g(root.at("grid"), "grid", {"t_final", "n_steps"});
    const double t_final = g.positive("t_final").value_or(p.grid.t_final());
    const auto n_steps = static_cast<std::size_t>(g.integer("n_steps", 2).value_or(static_cast<long long>(p.grid.n_steps())));
    checked("grid", [&] { p.grid = TimeGrid(t_final, n_steps); });
}

void read_target(const Section& root, Problem& p) {
    if (!root.has("target")) return;
    const Section t(root.at("target"), "target", {"functional", "omega", "theta"});
    if (auto v = t.string("functional")) {
        checked(t.key("functional"), [&] {
            const TargetKind kind = target_kind_from_string(*v);
            if (kind != p.target.kind) {
                p.target = kind == TargetKind::TypeI ? TargetSpec::type_one(p.sys.omega10) : TargetSpec::type_two();
            }
        });
    }
    if (auto v = t.number("omega")) {
        p.target.omega = *v;
    } else if (p.target.kind == TargetKind::TypeI) {
        p.target.omega = p.sys.omega10;
    }
    if (auto v = t.number("theta")) p.target.theta = *v;
}

void read_window(const Section& root, Problem& p) {
    if (!root.has("window")) return;
    const Section w(root.at("window"), "window", {"edges", "alpha"});
    if (auto v = w.numbers("edges")) p.window.edges = *v;
    if (auto v = w.positive("alpha")) p.window.alpha = *v;
    checked("window.edges", [&] { p.window.validate(p.grid.t_final()); });
}

void read_tolerances(const Section& opt, Tolerances& tol) {
    if (!opt.has("tolerances")) return;
    const Section t(opt.at("tolerances"), opt.key("tolerances"),
                    {"delta_j", "delta0", "delta1", "delta_f", "streak", "fluence_precision", "roundoff"});
    if (auto v = t.positive("delta_j")) tol.delta_j = *v;
    if (auto v = t.positive("delta0")) tol.delta0 = *v;
    if (auto v = t.positive("delta1")) tol.delta1 = *v;
    if (auto v = t.positive("delta_f")) tol.delta_f = *v;
    if (auto v = t.integer("streak", 1)) tol.streak = static_cast<int>(*v);
    if (auto v = t.positive("fluence_precision")) tol.fluence_precision = *v;
    if (auto v = t.non_negative("roundoff")) tol.roundoff = *v;
}

void read_guess(const Section& opt, InitialGuess& guess) {
    if (!opt.has("initial_guess")) return;
    const Section g(opt.at("initial_guess"), opt.key("initial_guess"), {"kind", "amplitude"});
    if (auto v = g.string("kind")) {
        if (*v == "carrier") {
            guess.kind = InitialGuess::Kind::Carrier;
        } else if (*v == "zero") {
            guess.kind = InitialGuess::Kind::Zero;
        } else {
            fail(g.key("kind"), "must be 'carrier' or 'zero'");
        }
    }
    if (auto v = g.number("amplitude")) guess.amplitude = *v;
}

void read_optimizer(const Section& root, OptimizerConfig& c) {
    if (!root.has("optimizer")) return;
    const Section o(root.at("optimizer"), "optimizer",
                    {"mode", "f0", "a0", "max_iterations", "damping", "step", "max_step_halvings", "a0_max_change",
                     "sweeps_per_update", "a0_gain", "tolerances", "initial_guess"});
    if (auto v = o.string("mode")) checked(o.key("mode"), [&] { c.mode = optimizer_mode_from_string(*v); });
    if (auto v = o.positive("f0")) c.f0 = *v;
    if (auto v = o.positive("a0")) c.a0_init = *v;
    if (auto v = o.integer("max_iterations", 1)) c.max_iterations = static_cast<int>(*v);
    if (auto v = o.positive("damping")) {
        if (*v > 1.0) fail(o.key("damping"), "must lie in (0, 1]");
        c.damping = *v;
    }
    if (auto v = o.positive("step")) c.step = *v;
    if (auto v = o.integer("max_step_halvings", 0)) c.max_step_halvings = static_cast<int>(*v);
    if (auto v = o.positive("a0_max_change")) c.a0_max_change = *v;
    if (auto v = o.integer("sweeps_per_update", 1)) c.sweeps_per_update = static_cast<int>(*v);
    if (auto v = o.positive("a0_gain")) {
        if (*v > 1.0) fail(o.key("a0_gain"), "must lie in (0, 1]");
        c.a0_gain = *v;
    }
    read_tolerances(o, c.tol);
    read_guess(o, c.guess);
}

void read_sweep(const Section& root, SweepAxes& axes) {
    if (!root.has("sweep")) return;
    const Section s(root.at("sweep"), "sweep", {"gamma_d", "gamma_pop", "f0", "a0", "functional"});
    auto read_axis = [&](std::string_view key, std::vector<double>& axis, bool allow_zero) {
        auto v = s.numbers(key);
        if (!v) return;
        for (double x : *v) {
            if (x < 0.0 || (!allow_zero && x == 0.0)) fail(s.key(key), allow_zero ? "values must be >= 0" : "values must be > 0");
        }
        axis = *v;
    };
    read_axis("gamma_d", axes.gamma_d, true);
    read_axis("gamma_pop", axes.gamma_pop, true);
    read_axis("f0", axes.f0, false);
    read_axis("a0", axes.a0, false);
    if (s.has("functional")) {
        const json& v = s.at("functional");
        if (!v.is_array()) fail(s.key("functional"), "must be an array of 'type1'/'type2'");
        axes.functional.clear();
        for (const json& e : v) {
            if (!e.is_string()) fail(s.key("functional"), "must be an array of 'type1'/'type2'");
            checked(s.key("functional"), [&] { axes.functional.push_back(target_kind_from_string(e.get<std::string>())); });
        }
    }
}

void read_outputs(const Section& root, OutputSelection& out) {
    if (!root.has("outputs")) return;
    const Section o(root.at("outputs"), "outputs",
                    {"pulses", "populations", "integrand", "purity", "bloch", "trajectories", "marker_interval"});
    if (auto v = o.boolean("pulses")) out.pulses = *v;
    if (auto v = o.boolean("populations")) out.populations = *v;
    if (auto v = o.boolean("integrand")) out.integrand = *v;
    if (auto v = o.boolean("purity")) out.purity = *v;
    if (auto v = o.boolean("bloch")) out.bloch = *v;
    if (auto v = o.boolean("trajectories")) out.trajectories = *v;
    if (auto v = o.positive("marker_interval")) out.marker_interval = *v;
}

json numbers_json(const std::vector<double>& v) { return json(v); }

}  // namespace

Scenario scenario_from_json(const json& doc) {
    const Section root(doc, "",
                       {"scenario", "name", "description", "system", "grid", "target", "window", "penalty", "optimizer",
                        "sweep", "outputs", "cross_functional", "baseline_gamma_pop", "split_time"});
    Scenario s;
    s.name = "custom";
    if (auto base = root.string("scenario")) {
        auto found = find_builtin(*base);
        if (!found) fail("scenario", "unknown built-in scenario '" + *base + "'");
        s = *found;
    }
    if (auto v = root.string("name")) {
        if (v->empty()) fail("name", "must not be empty");
        s.name = *v;
    }
    if (auto v = root.string("description")) s.description = *v;

    read_system(root, s.problem.sys);
    read_grid(root, s.problem);
    read_target(root, s.problem);
    read_window(root, s.problem);
    if (root.has("penalty")) {
        const Section p(root.at("penalty"), "penalty", {"ramp"});
        if (auto v = p.positive("ramp")) s.problem.ramp = *v;
    }
    read_optimizer(root, s.optimizer);
    read_sweep(root, s.axes);
    read_outputs(root, s.outputs);
    if (auto v = root.string("cross_functional")) {
        checked("cross_functional", [&] { s.cross_functional = target_kind_from_string(*v); });
    }
    if (auto v = root.non_negative("baseline_gamma_pop")) s.baseline_gamma_pop = *v;
    if (auto v = root.positive("split_time")) s.split_time = *v;

    checked("system", [&] { s.problem.sys.validate(); });
    checked("penalty", [&] { s.problem.penalty(1.0).validate(); });
    checked("optimizer", [&] { s.optimizer.validate(); });
    checked("scenario", [&] { s.validate(); });
    return s;
}

Scenario parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("<document>: invalid JSON: ") + e.what());
    }
    return scenario_from_json(doc);
}

json to_json(const Scenario& s) {
    const Problem& p = s.problem;
    const OptimizerConfig& o = s.optimizer;
    json doc;
    doc["name"] = s.name;
    doc["description"] = s.description;
    doc["system"] = {{"omega10", p.sys.omega10},
                     {"mu01", p.sys.mu01},
                     {"gamma_d", p.sys.gamma_d},
                     {"gamma_pop", p.sys.gamma_pop},
                     {"frame", std::string(to_string(p.sys.frame))}};
    doc["grid"] = {{"t_final", p.grid.t_final()}, {"n_steps", p.grid.n_steps()}};
    doc["target"] = {{"functional", std::string(to_string(p.target.kind))},
                     {"omega", p.target.omega},
                     {"theta", p.target.theta}};
    doc["window"] = {{"edges", numbers_json(p.window.edges)}, {"alpha", p.window.alpha}};
    doc["penalty"] = {{"ramp", p.ramp}};
    json guess = {{"kind", o.guess.kind == InitialGuess::Kind::Zero ? "zero" : "carrier"}};
    if (o.guess.amplitude) guess["amplitude"] = *o.guess.amplitude;
    doc["optimizer"] = {{"mode", std::string(to_string(o.mode))},
                        {"f0", o.f0},
                        {"a0", o.a0_init},
                        {"max_iterations", o.max_iterations},
                        {"damping", o.damping},
                        {"step", o.step},
                        {"max_step_halvings", o.max_step_halvings},
                        {"a0_max_change", o.a0_max_change},
                        {"sweeps_per_update", o.sweeps_per_update},
                        {"a0_gain", o.a0_gain},
                        {"tolerances",
                         {{"delta_j", o.tol.delta_j},
                          {"delta0", o.tol.delta0},
                          {"delta1", o.tol.delta1},
                          {"delta_f", o.tol.delta_f},
                          {"streak", o.tol.streak},
                          {"fluence_precision", o.tol.fluence_precision},
                          {"roundoff", o.tol.roundoff}}},
                        {"initial_guess", guess}};
    json functional = json::array();
    for (TargetKind k : s.axes.functional) functional.push_back(std::string(to_string(k)));
    doc["sweep"] = {{"gamma_d", numbers_json(s.axes.gamma_d)},
                    {"gamma_pop", numbers_json(s.axes.gamma_pop)},
                    {"f0", numbers_json(s.axes.f0)},
                    {"a0", numbers_json(s.axes.a0)},
                    {"functional", functional}};
    const OutputSelection& out = s.outputs;
    doc["outputs"] = {{"pulses", out.pulses},       {"populations", out.populations},
                      {"integrand", out.integrand}, {"purity", out.purity},
                      {"bloch", out.bloch},         {"trajectories", out.trajectories},
                      {"marker_interval", out.marker_interval}};
    if (s.cross_functional) doc["cross_functional"] = std::string(to_string(*s.cross_functional));
    if (s.baseline_gamma_pop) doc["baseline_gamma_pop"] = *s.baseline_gamma_pop;
    if (s.split_time) doc["split_time"] = *s.split_time;
    return doc;
}

void apply_tolerance(Scenario& s, std::string_view name, double value) {
    Tolerances& tol = s.optimizer.tol;
    const std::string key = "tolerance." + std::string(name);
    if (!std::isfinite(value)) fail(key, "must be finite");
    if (name == "roundoff") {
        if (value < 0.0) fail(key, "must be >= 0");
        tol.roundoff = value;
        return;
    }
    if (!(value > 0.0)) fail(key, "must be > 0");
    if (name == "delta_j") {
        tol.delta_j = value;
    } else if (name == "delta0") {
        tol.delta0 = value;
    } else if (name == "delta1") {
        tol.delta1 = value;
    } else if (name == "delta_f") {
        tol.delta_f = value;
    } else if (name == "fluence_precision") {
        tol.fluence_precision = value;
    } else if (name == "a0_max_change") {
        s.optimizer.a0_max_change = value;
    } else if (name == "streak") {
        if (value != std::floor(value)) fail(key, "must be an integer");
        tol.streak = static_cast<int>(value);
    } else {
        fail(key, "unknown tolerance");
    }
}

std::pair<std::string, double> parse_tolerance_arg(std::string_view arg) {
    const auto eq = arg.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("--tolerance: expected name=value, got '" + std::string(arg) + "'");
    }
    const std::string_view name = arg.substr(0, eq);
    const std::string_view text = arg.substr(eq + 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("--tolerance " + std::string(name) + ": '" + std::string(text) + "' is not a number");
    }
    return {std::string(name), value};
}

}  // namespace qoc::cli
