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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qoc/cli/app.hpp"
#include "qoc/errors.hpp"

namespace qoc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliRun : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qoc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) {
        std::ofstream(dir_ / name) << text;
        return dir_ / name;
    }

    int run(std::vector<std::string> args) {
        out_.str({});
        err_.str({});
        return run_command(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

constexpr const char* kSmall = R"({"scenario": "fig1", "name": "small", "grid": {"n_steps": 1200},
  "optimizer": {"max_iterations": 5}, "sweep": {"gamma_d": [0.1, 0.2]}, "outputs": {"purity": true}})";

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

TEST(CliConfig, ErrorsNameTheKey) {
    EXPECT_EQ(config_error(R"({"window": {"edges": [20, 5]}})"), "window.edges: edges must be strictly increasing");
    EXPECT_EQ(config_error(R"({"system": {"gamma_d": -1}})"), "system.gamma_d: must be >= 0");
    EXPECT_NE(config_error(R"({"sytem": {}})").find("sytem"), std::string::npos);
    EXPECT_NE(config_error(R"({"optimizer": {"mode": "newton"}})").find("optimizer.mode"), std::string::npos);
    EXPECT_NE(config_error("{not json").find("JSON"), std::string::npos);
    EXPECT_EQ(config_error(R"({"optimizer": {"a0_gain": 2}})"), "optimizer.a0_gain: must lie in (0, 1]");
    EXPECT_NE(config_error(R"({"optimizer": {"sweeps_per_update": 0}})").find("optimizer.sweeps_per_update"),
              std::string::npos);
}

TEST(CliConfig, ControllerKeys) {
    const Scenario s = parse_config(R"({"optimizer": {"sweeps_per_update": 4, "a0_gain": 0.5}})");
    EXPECT_EQ(s.optimizer.sweeps_per_update, 4);
    EXPECT_DOUBLE_EQ(s.optimizer.a0_gain, 0.5);
}

TEST(CliConfig, EchoRoundTrips) {
    for (const Scenario& s : builtin_scenarios()) {
        const json echo = to_json(s);
        EXPECT_EQ(to_json(parse_config(echo.dump())), echo) << s.name;
    }
}

TEST(CliConfig, ToleranceOverrides) {
    Scenario s = *find_builtin("fig1");
    apply_tolerance(s, "delta0", 1e-5);
    apply_tolerance(s, "streak", 10);
    EXPECT_DOUBLE_EQ(s.optimizer.tol.delta0, 1e-5);
    EXPECT_EQ(s.optimizer.tol.streak, 10);
    EXPECT_THROW(apply_tolerance(s, "nope", 1.0), ConfigError);
    EXPECT_EQ(parse_tolerance_arg("delta_f=1e-9").second, 1e-9);
    EXPECT_THROW(parse_tolerance_arg("delta_f"), ConfigError);
}

TEST(CliOutput, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 14.969, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(CliOutput, Sha256KnownAnswer) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(CliOutput, FieldFileRoundTrip) {
    SystemSpec sys;
    sys.frame = Frame::RotatingRWA;
    sys.gamma_d = 0.05;
    const TimeGrid grid(25.0, 100);
    std::vector<double> x(grid.size()), y(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        x[j] = std::sin(0.37 * static_cast<double>(j)) / 3.0;
        y[j] = std::cos(0.11 * static_cast<double>(j)) * 1e-7;
    }
    const FieldFile in{ControlField::rwa(x, y), grid, sys, 0.7, 1.0};
    const FieldFile back = read_field_json(write_field_json(in));
    for (std::size_t j = 0; j < grid.size(); ++j) {
        EXPECT_NEAR(back.field.x()[j], x[j], 1e-12);
        EXPECT_NEAR(back.field.y()[j], y[j], 1e-12);
    }
    EXPECT_EQ(back.grid, grid);
    EXPECT_DOUBLE_EQ(back.sys.gamma_d, 0.05);
    EXPECT_DOUBLE_EQ(back.a0, 0.7);
    EXPECT_THROW(read_field_json(R"({"format": "other"})"), ConfigError);
}

TEST_F(CliRun, RunWritesManifestWithDigests) {
    const fs::path cfg = write("small.json", kSmall);
    const fs::path out = dir_ / "out";
    ASSERT_EQ(run({"run", "--config", cfg.string(), "--out", out.string()}), kExitOk) << err_.str();
    const json manifest = json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["points"].size(), 2u);
    EXPECT_FALSE(manifest.contains("jobs"));
    ASSERT_FALSE(manifest["files"].empty());
    for (const json& f : manifest["files"]) {
        const std::string body = slurp(out / f["path"].get<std::string>());
        EXPECT_EQ(f["size"].get<std::size_t>(), body.size());
        EXPECT_EQ(f["sha256"].get<std::string>(), sha256_hex(body));
    }
    EXPECT_TRUE(fs::exists(out / "summary.csv"));
    EXPECT_TRUE(fs::exists(out / "contour.csv"));
    EXPECT_FALSE(fs::exists(dir_ / "out.staging"));
}

TEST_F(CliRun, OutputsAreDeterministicAcrossJobCounts) {
    const fs::path cfg = write("small.json", kSmall);
    ASSERT_EQ(run({"run", "--config", cfg.string(), "--out", (dir_ / "a").string()}), kExitOk);
    ASSERT_EQ(run({"run", "--config", cfg.string(), "--out", (dir_ / "b").string(), "--jobs", "2"}), kExitOk);
    EXPECT_EQ(slurp(dir_ / "a" / "manifest.json"), slurp(dir_ / "b" / "manifest.json"));
}

TEST_F(CliRun, RefusesToOverwrite) {
    const fs::path cfg = write("small.json", kSmall);
    const std::string out = (dir_ / "out").string();
    ASSERT_EQ(run({"run", "--config", cfg.string(), "--out", out}), kExitOk);
    EXPECT_EQ(run({"run", "--config", cfg.string(), "--out", out}), kExitConfigError);
    EXPECT_NE(err_.str().find("--force"), std::string::npos);
    EXPECT_EQ(run({"run", "--config", cfg.string(), "--out", out, "--force"}), kExitOk);
}

TEST_F(CliRun, ExitCodes) {
    EXPECT_EQ(run({}), kExitConfigError);
    EXPECT_EQ(run({"run", "--scenario", "fig99"}), kExitConfigError);
    EXPECT_EQ(run({"run", "--config", write("bad.json", R"({"grid": {"n_steps": -4}})").string()}),
              kExitConfigError);
    EXPECT_EQ(run({"list-scenarios"}), kExitOk);
    EXPECT_NE(out_.str().find("fig12"), std::string::npos);
    const fs::path diverge = write("diverge.json", R"({"scenario": "fig1", "grid": {"n_steps": 600},
      "optimizer": {"max_iterations": 3, "initial_guess": {"amplitude": 1e200}}, "sweep": {"gamma_d": [0.1]}})");
    EXPECT_EQ(run({"run", "--config", diverge.string(), "--out", (dir_ / "d").string()}), kExitFailedPoint);
    const json manifest = json::parse(slurp(dir_ / "d" / "manifest.json"));
    EXPECT_EQ(manifest["points"][0]["status"], "diverged");
}

TEST_F(CliRun, EvaluateAndPropagateStoredField) {
    const fs::path cfg = write("small.json", kSmall);
    const fs::path out = dir_ / "out";
    ASSERT_EQ(run({"run", "--config", cfg.string(), "--out", out.string()}), kExitOk);
    const json manifest = json::parse(slurp(out / "manifest.json"));
    const std::string label = manifest["points"][0]["label"];
    const fs::path field = out / "points" / label / "field.json";
    ASSERT_EQ(run({"evaluate", "--field", field.string()}), kExitOk) << err_.str();
    const json report = json::parse(out_.str());
    EXPECT_NEAR(report["report"]["F"].get<double>(), manifest["points"][0]["report"]["F"].get<double>(), 1e-12);
    EXPECT_EQ(run({"propagate", "--field", field.string(), "--out", (dir_ / "p").string()}), kExitOk);
    EXPECT_TRUE(fs::exists(dir_ / "p" / "trajectory.csv"));
    EXPECT_EQ(run({"propagate", "--field", "zero", "--out", (dir_ / "z").string()}), kExitOk);
}

}  // namespace
}  // namespace qoc::cli
