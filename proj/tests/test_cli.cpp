// Copyright 2026 The jjchain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "jjchain/cli.hpp"
#include "jjchain/config.hpp"
#include "jjchain/output.hpp"

using namespace jjchain;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("jjchain_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

RunConfig parse(std::vector<std::string> args) {
    args.insert(args.begin(), "jjchain");
    auto cfg = parse_config(args);
    REQUIRE(cfg.has_value());
    return *cfg;
}

int run_args(std::vector<std::string> args) {
    args.insert(args.begin(), "jjchain");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) {
        out.push_back(l);
    }
    return out;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("float formatting round-trips") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(std::nan("")) == "nan");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 1000; ++k) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        const std::string s = format_double(x);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
        std::string mantissa;
        for (char c : s.substr(0, s.find('e'))) {
            if (c >= '0' && c <= '9') {
                mantissa += c;
            }
        }
        const auto first = mantissa.find_first_not_of('0');
        const auto last = mantissa.find_last_not_of('0');
        CHECK(last - first + 1 <= 17);
    }
}

TEST_CASE("csv layout") {
    Table empty;
    empty.columns = {"a", "b"};
    CHECK(to_csv(empty) == "a,b\n");
    Table t;
    t.columns = {"x", "n", "s"};
    t.add_row({0.25, 3LL, std::string("ok")});
    CHECK(to_csv(t) == "x,n,s\n0.25,3,ok\n");
    CHECK_THROWS(t.add_row({1.0}));
}

TEST_CASE("svg plot has axes, labels and one polyline per series") {
    Plot p;
    p.title = "demo";
    p.x_label = "time";
    p.y_label = "fidelity";
    p.series = {{"a", {0, 1, 2}, {0.5, 0.7, 0.6}}, {"b", {0, 1, 2}, {0.6, 0.6, 0.9}}};
    const std::string svg = render_svg(p);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find(">time<") != std::string::npos);
    CHECK(svg.find(">fidelity<") != std::string::npos);
    std::size_t count = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) {
        ++count;
    }
    CHECK(count == 2);
}

TEST_CASE("flags build the noise configuration") {
    const auto cfg = parse({"--length", "7", "--u0", "10", "--c-ratio", "0.1", "--gamma", "0.01", "dephasing"});
    CHECK(cfg.subcommand == Subcommand::dephasing);
    CHECK(cfg.length == 7);
    CHECK(cfg.u0 == 10.0);
    CHECK(cfg.c_ratio == 0.1);
    CHECK(cfg.gamma == 0.01);
}

TEST_CASE("flags may follow the subcommand") {
    const auto cfg = parse({"sweep-length", "--lengths", "2,3,4", "--c-ratios", "0.05,0.1"});
    CHECK(cfg.lengths == std::vector<int>{2, 3, 4});
    CHECK(cfg.c_ratios == std::vector<double>{0.05, 0.1});
}

TEST_CASE("invalid values name the field and constraint") {
    CHECK_THROWS_WITH_AS(parse({"--length", "0", "fidelity-series"}), doctest::Contains("L >= 1"), ConfigError);
    CHECK_THROWS_AS(parse({"--length", "seven", "fidelity-series"}), ConfigError);
    CHECK_THROWS_AS(parse({"--no-such-flag", "1", "fidelity-series"}), ConfigError);
    CHECK_THROWS_AS(parse({"--length", "3"}), ConfigError);
    CHECK_THROWS_WITH_AS(parse({"--threshold", "1.5", "sweep-length"}), doctest::Contains("threshold"), ConfigError);
    CHECK_THROWS_WITH_AS(parse({"--length", "3", "--ej-bonds", "1,1,1", "fidelity-series"}),
                         doctest::Contains("ej_bonds"), ConfigError);
    CHECK_THROWS_AS(parse({"--format", "png", "fidelity-series"}), ConfigError);
    CHECK_THROWS_AS(parse({"reproduce", "fig8"}), ConfigError);
}

TEST_CASE("flags override the config file") {
    const auto dir = scratch("precedence");
    const fs::path file = dir / "run.ini";
    std::ofstream(file) << "[chain]\nlength = 5\nqx = [0.01, 0, 0, 0, -0.01]\n[time]\ndt = 0.05\nt_max = 12\n";
    const auto cfg = parse({"--config", file.string(), "--dt", "0.01", "fidelity-series"});
    CHECK(cfg.dt == 0.01);
    CHECK(cfg.t_max == 12.0);
    CHECK(cfg.length == 5);
    CHECK(cfg.qx == std::vector<double>{0.01, 0.0, 0.0, 0.0, -0.01});
    fs::remove_all(dir);
}

TEST_CASE("config files reject unknown or misplaced keys") {
    const auto dir = scratch("keys");
    const fs::path unknown = dir / "unknown.ini";
    std::ofstream(unknown) << "[chain]\nlenght = 5\n";
    CHECK_THROWS_WITH_AS(parse({"--config", unknown.string(), "fidelity-series"}), doctest::Contains("lenght"),
                         ConfigError);
    const fs::path misplaced = dir / "misplaced.ini";
    std::ofstream(misplaced) << "[noise]\nlength = 5\n";
    CHECK_THROWS_AS(parse({"--config", misplaced.string(), "fidelity-series"}), ConfigError);
    const fs::path bare = dir / "bare.ini";
    std::ofstream(bare) << "length = 5\n";
    CHECK_THROWS_AS(parse({"--config", bare.string(), "fidelity-series"}), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("resolved configuration round-trips") {
    const auto dir = scratch("roundtrip");
    const auto original = parse({"--length", "4", "--u0", "9.5", "--c-ratio", "0.07", "--qx", "0.1,0,0,-0.2",
                                 "--ej-bonds", "1,0.9,1.1", "--t-max", "33.3", "--dt", "0.005", "--gamma",
                                 "0.02", "--gamma-qp", "0.04", "--t-star", "3", "--t-pulse", "2", "--t-tail",
                                 "600", "--theta", "3.141592653589793", "--phi", "0.1", "--t-star-max", "10",
                                 "--t-star-step", "0.1", "--lengths", "2,3", "--c-ratios", "0.05,0.1",
                                 "--threshold", "0.9", "--realizations", "12", "--seed", "18446744073709551615",
                                 "--bond-sigma", "0.1", "--charge-sigma", "0.025", "--threads", "2", "--output",
                                 (dir / "out dir").string(), "--format", "csv+svg", "reproduce", "fig4"});
    const fs::path file = dir / "resolved.ini";
    std::ofstream(file) << to_config_text(original);
    const auto again = parse({"--config", file.string(), "reproduce", "fig4"});
    CHECK(again == original);
    fs::remove_all(dir);
}

TEST_CASE("output directory falls back to the environment") {
    const auto dir = scratch("env");
    ::setenv(output_dir_env, dir.string().c_str(), 1);
    CHECK(parse({"fidelity-series"}).output == dir);
    CHECK(parse({"--output", "elsewhere", "fidelity-series"}).output == fs::path("elsewhere"));
    ::unsetenv(output_dir_env);
    CHECK(parse({"fidelity-series"}).output == fs::path("."));
    fs::remove_all(dir);
}

TEST_CASE("fidelity series schema") {
    const auto dir = scratch("schema");
    CHECK(run_args({"--length", "3", "--t-max", "0.02", "--dt", "0.01", "--output", dir.string(),
                    "fidelity-series"}) == exit_ok);
    const auto rows = lines(slurp(dir / "fidelity-series.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "t,re_f,im_f,abs_f,fidelity");
    CHECK(slurp(dir / "fidelity-series.csv").find('\r') == std::string::npos);
    CHECK(fs::exists(dir / "fidelity-series.meta.json"));
    CHECK_FALSE(fs::exists(dir / "fidelity-series.svg"));
    fs::remove_all(dir);
}

TEST_CASE("repeated runs give identical csv bodies") {
    const auto a = scratch("repeat_a");
    const auto b = scratch("repeat_b");
    const std::vector<std::string> common{"--length", "7", "--realizations", "6", "--seed", "3", "--bond-sigma",
                                          "0.1", "--t-max", "20", "disorder-ensemble", "--output"};
    auto args_a = common;
    args_a.push_back(a.string());
    auto args_b = common;
    args_b.push_back(b.string());
    CHECK(run_args(args_a) == exit_ok);
    CHECK(run_args(args_b) == exit_ok);
    CHECK(slurp(a / "disorder-ensemble.csv") == slurp(b / "disorder-ensemble.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("subcommand outputs") {
    const auto dir = scratch("subcommands");
    const std::string out = dir.string();
    CHECK(run_args({"--length", "4", "--t-max", "5", "--output", out, "--format", "csv+svg", "dephasing"}) == exit_ok);
    CHECK(lines(slurp(dir / "dephasing.csv"))[0] == "t,fidelity,rho_LL,rho_11,trace_error,min_eigenvalue");
    CHECK(fs::exists(dir / "dephasing.svg"));
    CHECK(run_args({"--length", "4", "--t-star-max", "2", "--output", out, "readout"}) == exit_ok);
    CHECK(lines(slurp(dir / "readout.csv"))[0] ==
          "t_star,integrated_current,approx_integrated_current,fidelity_isolated,rho_LL,p_qp");
    CHECK(run_args({"--lengths", "2,3", "--output", out, "sweep-length"}) == exit_ok);
    CHECK(lines(slurp(dir / "sweep-length.csv")).size() == 5);
    const std::string meta = slurp(dir / "sweep-length.meta.json");
    CHECK(meta.find("\"config\"") != std::string::npos);
    CHECK(meta.find("\"version\"") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    CHECK(run_args({"--help"}) == exit_ok);
    CHECK(run_args({"--length", "0", "fidelity-series"}) == exit_config_error);
    CHECK(run_args({"--bogus", "fidelity-series"}) == exit_config_error);
    // A hopelessly coarse step on a stiff chain exhausts the step refinements.
    CHECK(run_args({"--length", "3", "--u0", "20000", "--dt", "0.05", "--t-max", "5", "--output", dir.string(),
                    "dephasing"}) == exit_numerical_error);
    fs::remove_all(dir);
}

}
