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

#include "jjchain/config.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "jjchain/output.hpp"

namespace jjchain {

std::string subcommand_name(Subcommand s) {
    switch (s) {
    case Subcommand::fidelity_series: return "fidelity-series";
    case Subcommand::sweep_length: return "sweep-length";
    case Subcommand::disorder_ensemble: return "disorder-ensemble";
    case Subcommand::dephasing: return "dephasing";
    case Subcommand::readout: return "readout";
    case Subcommand::reproduce: return "reproduce";
    }
    return "unknown";
}

namespace {

const std::map<std::string, std::string>& key_sections() {
    static const std::map<std::string, std::string> table = {
        {"length", "chain"},       {"u0", "chain"},           {"c_ratio", "chain"},
        {"qx", "chain"},           {"ej_bonds", "chain"},     {"t_max", "time"},
        {"dt", "time"},            {"gamma", "noise"},        {"gamma_qp", "readout"},
        {"t_star", "readout"},     {"t_pulse", "readout"},    {"t_tail", "readout"},
        {"theta", "readout"},      {"phi", "readout"},        {"t_star_max", "readout"},
        {"t_star_step", "readout"}, {"lengths", "sweep"},     {"c_ratios", "sweep"},
        {"threshold", "sweep"},    {"realizations", "sweep"}, {"seed", "sweep"},
        {"bond_sigma", "sweep"},   {"charge_sigma", "sweep"}, {"threads", "sweep"},
        {"output", "output"},      {"format", "output"},
    };
    return table;
}

// Reads [section] key = value text and hands CLI11 flat option names,
// checking each key sits in the section that owns it.
class SectionedConfig : public CLI::ConfigINI {
public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::vector<CLI::ConfigItem> flat;
        for (auto& item : CLI::ConfigINI::from_config(input)) {
            if (item.name == "++" || item.name == "--") {
                continue;
            }
            if (item.parents.size() != 1) {
                throw CLI::ConfigError("config key '" + item.fullname() +
                                       "' must appear in exactly one [section]");
            }
            const auto& sections = key_sections();
            auto it = sections.find(item.name);
            if (it == sections.end()) {
                throw CLI::ConfigError("unknown config key '" + item.fullname() + "'");
            }
            if (it->second != item.parents.front()) {
                throw CLI::ConfigError("config key '" + item.name + "' belongs in [" + it->second +
                                       "], found in [" + item.parents.front() + "]");
            }
            item.parents.clear();
            for (char& c : item.name) {
                if (c == '_') {
                    c = '-';
                }
            }
            flat.push_back(std::move(item));
        }
        return flat;
    }
};

template <typename T>
void take(const CLI::Option* opt, const T& value, std::optional<T>& slot) {
    if (opt->count() > 0) {
        slot = value;
    }
}

void check(bool ok, const std::string& field, const std::string& constraint) {
    if (!ok) {
        throw ConfigError(field + ": " + constraint);
    }
}

bool finite(double v) { return std::isfinite(v); }

} // namespace

void validate(const RunConfig& c) {
    if (c.length) check(*c.length >= 1, "length", "L >= 1 required");
    if (c.u0) check(finite(*c.u0) && *c.u0 >= 0.0, "u0", "must be finite and >= 0");
    if (c.c_ratio) check(finite(*c.c_ratio) && *c.c_ratio >= 0.0, "c_ratio", "must be finite and >= 0");
    const int L = c.length.value_or(7);
    if (c.qx) {
        check(static_cast<int>(c.qx->size()) == L, "qx", "needs exactly L entries");
        for (double q : *c.qx) check(finite(q), "qx", "entries must be finite");
    }
    if (c.ej_bonds) {
        check(static_cast<int>(c.ej_bonds->size()) == L - 1, "ej_bonds", "needs exactly L-1 entries");
        for (double e : *c.ej_bonds) check(finite(e) && e > 0.0, "ej_bonds", "entries must be > 0");
    }
    if (c.t_max) check(finite(*c.t_max) && *c.t_max > 0.0, "t_max", "must be > 0");
    if (c.dt) check(finite(*c.dt) && *c.dt > 0.0, "dt", "must be > 0");
    if (c.gamma) check(finite(*c.gamma) && *c.gamma >= 0.0, "gamma", "must be >= 0");
    if (c.gamma_qp) check(finite(*c.gamma_qp) && *c.gamma_qp > 0.0, "gamma_qp", "must be > 0");
    if (c.t_star) check(finite(*c.t_star) && *c.t_star >= 0.0, "t_star", "must be >= 0");
    if (c.t_pulse) check(finite(*c.t_pulse) && *c.t_pulse > 0.0, "t_pulse", "must be > 0");
    if (c.t_tail) {
        check(finite(*c.t_tail) && *c.t_tail >= 0.0, "t_tail", "must be >= 0");
        check(*c.t_tail == 0.0 || *c.t_tail * c.gamma_qp.value_or(0.05) >= 20.0, "t_tail",
              "must be >= 20/gamma_qp");
    }
    if (c.theta) check(finite(*c.theta), "theta", "must be finite");
    if (c.phi) check(finite(*c.phi), "phi", "must be finite");
    if (c.t_star_max) check(finite(*c.t_star_max) && *c.t_star_max > 0.0, "t_star_max", "must be > 0");
    if (c.t_star_step) check(finite(*c.t_star_step) && *c.t_star_step > 0.0, "t_star_step", "must be > 0");
    if (c.lengths) {
        check(!c.lengths->empty(), "lengths", "must be nonempty");
        for (int l : *c.lengths) check(l >= 1, "lengths", "each L >= 1 required");
    }
    if (c.c_ratios) {
        check(!c.c_ratios->empty(), "c_ratios", "must be nonempty");
        for (double r : *c.c_ratios) check(finite(r) && r >= 0.0, "c_ratios", "each must be >= 0");
    }
    if (c.threshold) check(*c.threshold > 0.5 && *c.threshold < 1.0, "threshold", "must lie in (0.5, 1)");
    if (c.realizations) check(*c.realizations >= 1, "realizations", "must be >= 1");
    if (c.bond_sigma) check(finite(*c.bond_sigma) && *c.bond_sigma >= 0.0, "bond_sigma", "must be >= 0");
    if (c.charge_sigma) check(finite(*c.charge_sigma) && *c.charge_sigma >= 0.0, "charge_sigma", "must be >= 0");
    if (c.threads) check(*c.threads >= 0, "threads", "must be >= 0");
    if (c.subcommand == Subcommand::reproduce) {
        static const std::vector<std::string> figures = {"fig2", "fig3", "fig4", "fig5", "fig6"};
        check(c.figure && std::find(figures.begin(), figures.end(), *c.figure) != figures.end(), "figure",
              "must be one of fig2, fig3, fig4, fig5, fig6");
    }
    check(!c.output.empty(), "output", "path must be nonempty");
}

std::optional<RunConfig> parse_config(const std::vector<std::string>& argv) {
    CLI::App app{"Quantum state transfer through Josephson junction chains", "jjchain"};
    app.set_config("--config", "", "Sectioned key = value configuration file");
    app.config_formatter(std::make_shared<SectionedConfig>());
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.fallthrough();

    int length = 0, realizations = 0, threads = 0;
    double u0 = 0, c_ratio = 0, t_max = 0, dt = 0, gamma = 0, gamma_qp = 0, t_star = 0, t_pulse = 0,
           t_tail = 0, theta = 0, phi = 0, t_star_max = 0, t_star_step = 0, threshold = 0, bond_sigma = 0,
           charge_sigma = 0;
    std::uint64_t seed = 0;
    std::vector<double> qx, ej_bonds, c_ratios;
    std::vector<int> lengths;
    std::string output, format = "csv";

    auto* o_length = app.add_option("--length", length, "Number of islands L")->group("chain");
    auto* o_u0 = app.add_option("--u0", u0, "Charging ratio (2e)^2/(E_J C0)")->group("chain");
    auto* o_c = app.add_option("--c-ratio", c_ratio, "Junction to ground capacitance ratio C/C0")->group("chain");
    auto* o_qx = app.add_option("--qx", qx, "Gate charges per island (units of 2e)")->delimiter(',')->group("chain");
    auto* o_ej = app.add_option("--ej-bonds", ej_bonds, "Josephson energy per bond (units of E_J)")
                     ->delimiter(',')->group("chain");
    auto* o_tmax = app.add_option("--t-max", t_max, "Time window (1/E_J)")->group("time");
    auto* o_dt = app.add_option("--dt", dt, "Time step (1/E_J)")->group("time");
    auto* o_gamma = app.add_option("--gamma", gamma, "Gate-noise strength")->group("noise");
    auto* o_gqp = app.add_option("--gamma-qp", gamma_qp, "Quasiparticle tunnelling rate")->group("readout");
    auto* o_ts = app.add_option("--t-star", t_star, "Disconnection time")->group("readout");
    auto* o_tp = app.add_option("--t-pulse", t_pulse, "Pulse period T")->group("readout");
    auto* o_tt = app.add_option("--t-tail", t_tail, "Post-disconnect horizon")->group("readout");
    auto* o_theta = app.add_option("--theta", theta, "Input Bloch angle theta")->group("readout");
    auto* o_phi = app.add_option("--phi", phi, "Input Bloch angle phi")->group("readout");
    auto* o_tsm = app.add_option("--t-star-max", t_star_max, "Last disconnection time of a sweep")->group("readout");
    auto* o_tss = app.add_option("--t-star-step", t_star_step, "Disconnection-time grid spacing")->group("readout");
    auto* o_lengths = app.add_option("--lengths", lengths, "Chain lengths of a sweep")->delimiter(',')->group("sweep");
    auto* o_ratios = app.add_option("--c-ratios", c_ratios, "C/C0 values of a sweep")->delimiter(',')->group("sweep");
    auto* o_thr = app.add_option("--threshold", threshold, "Fidelity threshold in (0.5, 1)")->group("sweep");
    auto* o_real = app.add_option("--realizations", realizations, "Disorder realizations")->group("sweep");
    auto* o_seed = app.add_option("--seed", seed, "Master seed")->group("sweep");
    auto* o_bond = app.add_option("--bond-sigma", bond_sigma, "Relative spread of E_J")->group("sweep");
    auto* o_charge = app.add_option("--charge-sigma", charge_sigma, "Spread of gate charges (2e)")->group("sweep");
    auto* o_threads = app.add_option("--threads", threads, "Worker threads (0 = all cores)")->group("sweep");
    auto* o_out = app.add_option("--output", output, std::string("Output directory (default $") + output_dir_env + ")")
                      ->group("output");
    app.add_option("--format", format, "csv or csv+svg")->check(CLI::IsMember({"csv", "csv+svg"}))->group("output");

    RunConfig cfg;
    std::string figure;
    std::map<CLI::App*, Subcommand> subs;
    subs[app.add_subcommand("fidelity-series", "Closed-chain fidelity trace and first maximum")] =
        Subcommand::fidelity_series;
    subs[app.add_subcommand("sweep-length", "First (and threshold) maximum versus chain length")] =
        Subcommand::sweep_length;
    subs[app.add_subcommand("disorder-ensemble", "Ensemble-averaged fidelity under static disorder")] =
        Subcommand::disorder_ensemble;
    subs[app.add_subcommand("dephasing", "Fidelity under correlated gate-voltage noise")] = Subcommand::dephasing;
    subs[app.add_subcommand("readout", "Integrated SET current versus disconnection time")] = Subcommand::readout;
    auto* reproduce = app.add_subcommand("reproduce", "Regenerate a figure bundle (CSV, SVG, metadata)");
    reproduce->add_option("figure", figure, "fig2 | fig3 | fig4 | fig5 | fig6")->required();
    subs[reproduce] = Subcommand::reproduce;

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return std::nullopt;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    for (const auto& [ptr, kind] : subs) {
        if (ptr->parsed()) {
            cfg.subcommand = kind;
        }
    }
    if (cfg.subcommand == Subcommand::reproduce) {
        cfg.figure = figure;
    }
    take(o_length, length, cfg.length);
    take(o_u0, u0, cfg.u0);
    take(o_c, c_ratio, cfg.c_ratio);
    take(o_qx, qx, cfg.qx);
    take(o_ej, ej_bonds, cfg.ej_bonds);
    take(o_tmax, t_max, cfg.t_max);
    take(o_dt, dt, cfg.dt);
    take(o_gamma, gamma, cfg.gamma);
    take(o_gqp, gamma_qp, cfg.gamma_qp);
    take(o_ts, t_star, cfg.t_star);
    take(o_tp, t_pulse, cfg.t_pulse);
    take(o_tt, t_tail, cfg.t_tail);
    take(o_theta, theta, cfg.theta);
    take(o_phi, phi, cfg.phi);
    take(o_tsm, t_star_max, cfg.t_star_max);
    take(o_tss, t_star_step, cfg.t_star_step);
    take(o_lengths, lengths, cfg.lengths);
    take(o_ratios, c_ratios, cfg.c_ratios);
    take(o_thr, threshold, cfg.threshold);
    take(o_real, realizations, cfg.realizations);
    take(o_seed, seed, cfg.seed);
    take(o_bond, bond_sigma, cfg.bond_sigma);
    take(o_charge, charge_sigma, cfg.charge_sigma);
    take(o_threads, threads, cfg.threads);
    if (o_out->count() > 0) {
        cfg.output = output;
    } else if (const char* env = std::getenv(output_dir_env); env != nullptr && *env != '\0') {
        cfg.output = env;
    }
    cfg.format = format == "csv+svg" ? OutputFormat::csv_svg : OutputFormat::csv;

    validate(cfg);
    return cfg;
}

namespace {

std::string list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + format_double(v[i]);
    }
    return s + "]";
}

std::string list(const std::vector<int>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + std::to_string(v[i]);
    }
    return s + "]";
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string to_config_text(const RunConfig& c) {
    std::ostringstream out;
    auto num = [&](const char* key, const std::optional<double>& v) {
        if (v) out << key << " = " << format_double(*v) << "\n";
    };
    out << "# jjchain " << version() << " resolved configuration (" << subcommand_name(c.subcommand);
    if (c.figure) out << " " << *c.figure;
    out << ")\n";
    out << "[chain]\n";
    if (c.length) out << "length = " << *c.length << "\n";
    num("u0", c.u0);
    num("c_ratio", c.c_ratio);
    if (c.qx) out << "qx = " << list(*c.qx) << "\n";
    if (c.ej_bonds) out << "ej_bonds = " << list(*c.ej_bonds) << "\n";
    out << "\n[time]\n";
    num("t_max", c.t_max);
    num("dt", c.dt);
    out << "\n[noise]\n";
    num("gamma", c.gamma);
    out << "\n[readout]\n";
    num("gamma_qp", c.gamma_qp);
    num("t_star", c.t_star);
    num("t_pulse", c.t_pulse);
    num("t_tail", c.t_tail);
    num("theta", c.theta);
    num("phi", c.phi);
    num("t_star_max", c.t_star_max);
    num("t_star_step", c.t_star_step);
    out << "\n[sweep]\n";
    if (c.lengths) out << "lengths = " << list(*c.lengths) << "\n";
    if (c.c_ratios) out << "c_ratios = " << list(*c.c_ratios) << "\n";
    num("threshold", c.threshold);
    if (c.realizations) out << "realizations = " << *c.realizations << "\n";
    if (c.seed) out << "seed = " << *c.seed << "\n";
    num("bond_sigma", c.bond_sigma);
    num("charge_sigma", c.charge_sigma);
    if (c.threads) out << "threads = " << *c.threads << "\n";
    out << "\n[output]\n";
    out << "output = " << quoted(c.output.string()) << "\n";
    out << "format = " << (c.format == OutputFormat::csv_svg ? "\"csv+svg\"" : "\"csv\"") << "\n";
    return out.str();
}

} // namespace jjchain
