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

#include "jjchain/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <system_error>

#include "jjchain/dephasing.hpp"
#include "jjchain/experiments.hpp"
#include "jjchain/output.hpp"
#include "jjchain/peaks.hpp"
#include "jjchain/readout.hpp"
#include "jjchain/transfer.hpp"

namespace jjchain {

namespace {

namespace fs = std::filesystem;

ChainParams chain_from(const RunConfig& c, double default_c_ratio) {
    ChainParams p = ChainParams::uniform(c.length.value_or(7), c.u0.value_or(10.0), c.c_ratio.value_or(default_c_ratio));
    if (c.qx) {
        p.qx = *c.qx;
    }
    if (c.ej_bonds) {
        p.ej_bonds = *c.ej_bonds;
    }
    p.validate();
    return p;
}

std::string peak_text(const PeakResult& p) {
    return "t=" + format_double(p.t_peak) + " F=" + format_double(p.f_peak);
}

struct Bundle {
    Table table;
    Plot plot;
    Metadata meta;
    std::vector<std::pair<std::string, Table>> extra_tables;
};

void fidelity_series_command(const RunConfig& c, Bundle& b) {
    const ChainParams params = chain_from(c, 0.1);
    const double t_max = c.t_max.value_or(50.0 * params.length);
    const double dt = c.dt.value_or(0.01);
    const Propagator prop(build_hamiltonian(params));
    const FidelitySeries s = fidelity_series(prop, t_max, dt);

    b.table.columns = {"t", "re_f", "im_f", "abs_f", "fidelity"};
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        const Complex f = s.amplitude[k];
        b.table.add_row({s.times[k], f.real(), f.imag(), std::abs(f), s.fidelity[k]});
    }
    try {
        b.meta.results.emplace_back("first_maximum", peak_text(find_first_maximum(s, prop)));
    } catch (const NoPeakFound& e) {
        b.meta.results.emplace_back("first_maximum", std::string("none: ") + e.what());
    }
    if (c.threshold) {
        try {
            b.meta.results.emplace_back("first_above_threshold",
                                        peak_text(find_first_above_threshold(s, prop, *c.threshold)));
        } catch (const NoPeakFound& e) {
            b.meta.results.emplace_back("first_above_threshold", std::string("none: ") + e.what());
        }
    }
    b.plot.series = {{"fidelity", s.times, s.fidelity}};
    b.plot.x_label = "time (1/E_J)";
    b.plot.y_label = "fidelity";
}

void sweep_length_command(const RunConfig& c, Bundle& b) {
    SweepSpec spec;
    spec.lengths = c.lengths.value_or(std::vector<int>{2, 3, 4, 5, 6, 7, 8, 9, 10});
    spec.u0 = c.u0.value_or(10.0);
    spec.c_ratios = c.c_ratios.value_or(std::vector<double>{0.05, 0.1});
    spec.t_max = c.t_max.value_or(0.0);
    spec.dt = c.dt.value_or(0.01);
    spec.threshold = c.threshold;
    spec.validate();
    const auto rows = run_length_sweep(spec, c.threads.value_or(0));
    b.table = length_sweep_table(rows);
    for (double ratio : spec.c_ratios) {
        PlotSeries series{"C/C0 = " + format_double(ratio), {}, {}};
        for (const auto& r : rows) {
            if (r.c_ratio == ratio && r.first) {
                series.x.push_back(r.length);
                series.y.push_back(r.first->f_peak);
            }
        }
        b.plot.series.push_back(series);
    }
    b.plot.x_label = "chain length L";
    b.plot.y_label = "first-maximum fidelity";
}

void disorder_command(const RunConfig& c, Bundle& b) {
    SweepSpec spec;
    spec.lengths = {c.length.value_or(7)};
    spec.u0 = c.u0.value_or(10.0);
    spec.c_ratios = {c.c_ratio.value_or(0.0)};
    spec.disorder = DisorderSpec{c.bond_sigma.value_or(0.0), c.charge_sigma.value_or(0.0), 0};
    spec.realizations = c.realizations.value_or(500);
    spec.master_seed = c.seed.value_or(0);
    spec.t_max = c.t_max.value_or(0.0);
    spec.dt = c.dt.value_or(0.01);
    spec.validate();
    const auto ens = run_disorder_ensemble(spec, c.threads.value_or(0));

    b.table.columns = {"t", "mean_fidelity", "std_error"};
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
        b.table.add_row({ens.times[k], ens.fidelity.mean[k], ens.fidelity.std_error[k]});
    }
    b.meta.seed = spec.master_seed;
    if (!ens.first_peak.mean.empty()) {
        b.meta.results.emplace_back("first_peak_mean", format_double(ens.first_peak.mean[0]));
        b.meta.results.emplace_back("first_peak_std_error", format_double(ens.first_peak.std_error[0]));
    }
    b.meta.results.emplace_back("failed_peaks", std::to_string(ens.failed_peaks));
    b.plot.series = {{"ensemble mean", ens.times, ens.fidelity.mean}};
    b.plot.x_label = "time (1/E_J)";
    b.plot.y_label = "fidelity";
}

void dephasing_command(const RunConfig& c, Bundle& b) {
    const ChainParams params = chain_from(c, 0.1);
    const CapacitanceModel model = build_capacitance_model(params.length, params.c_ratio);
    const ChargeSectorHamiltonian h = build_hamiltonian(params, model);
    DephasingOptions opts;
    opts.t_max = c.t_max.value_or(100.0);
    opts.dt = c.dt.value_or(0.002);
    opts.keep_states = false;
    const double theta = c.theta.value_or(std::numbers::pi / 2.0);
    const auto run = evolve_dephasing(input_state(params.length, theta, c.phi.value_or(0.0)), h,
                                      build_dephasing_rates(c.gamma.value_or(0.01), model), opts);

    b.table.columns = {"t", "fidelity", "rho_LL", "rho_11", "trace_error", "min_eigenvalue"};
    for (std::size_t k = 0; k < run.times.size(); ++k) {
        b.table.add_row({run.times[k], run.fidelity[k], run.rho_LL[k], run.rho_11[k],
                         run.diagnostics[k].trace_error, run.diagnostics[k].min_eigenvalue});
    }
    b.meta.results.emplace_back("stationary_fidelity", format_double(stationary_fidelity(params.length)));
    b.plot.series = {{"fidelity", run.times, run.fidelity}};
    b.plot.x_label = "time (1/E_J)";
    b.plot.y_label = "fidelity";
}

void readout_command(const RunConfig& c, Bundle& b) {
    const ChainParams params = chain_from(c, 0.1);
    ReadoutParams rp;
    rp.gamma_qp = c.gamma_qp.value_or(rp.gamma_qp);
    rp.t_star = c.t_star.value_or(0.0);
    rp.t_pulse = c.t_pulse.value_or(rp.t_pulse);
    rp.t_tail = c.t_tail.value_or(0.0);
    rp.dt = c.dt.value_or(rp.dt);
    rp.validate();
    const double theta = c.theta.value_or(std::numbers::pi);
    const double phi = c.phi.value_or(0.0);

    if (c.t_star_max) {
        const double step = c.t_star_step.value_or(0.05);
        std::vector<double> grid;
        const auto n = static_cast<long>(std::floor(*c.t_star_max / step + 1e-9));
        for (long k = 0; k <= n; ++k) {
            grid.push_back(static_cast<double>(k) * step);
        }
        const auto rows = current_vs_tstar_sweep(params, rp.gamma_qp, grid, theta, phi, rp);
        b.table.columns = {"t_star", "integrated_current", "approx_integrated_current",
                           "fidelity_isolated", "rho_LL", "p_qp"};
        PlotSeries current{"integrated current (e/T)", {}, {}};
        PlotSeries fidelity{"fidelity, isolated chain", {}, {}};
        for (const auto& r : rows) {
            b.table.add_row({r.t_star, r.integrated_current, r.approx_integrated_current, r.fidelity_isolated,
                             r.rho_LL, r.p_qp});
            current.x.push_back(r.t_star);
            current.y.push_back(r.integrated_current);
            fidelity.x.push_back(r.t_star);
            fidelity.y.push_back(r.fidelity_isolated);
        }
        b.plot.series = {current, fidelity};
        b.plot.x_label = "disconnection time t* (1/E_J)";
        b.plot.y_label = "current (e/T) / fidelity";
        return;
    }

    const auto run = evolve_readout(theta, phi, params, rp);
    b.table.columns = {"t", "current", "p_vac", "p_qp", "rho_LL"};
    for (std::size_t k = 0; k < run.times.size(); ++k) {
        b.table.add_row({run.times[k], run.current[k], run.p_vac[k], run.p_qp[k], run.rho_LL[k]});
    }
    auto& r = b.meta.results;
    r.emplace_back("integrated_current", format_double(run.integrated_current));
    r.emplace_back("pre_disconnect_charge", format_double(run.pre_disconnect_charge));
    r.emplace_back("post_disconnect_charge", format_double(run.post_disconnect_charge));
    r.emplace_back("approx_integrated_current", format_double(run.approx_integrated_current));
    if (!rp.disconnect_is_early()) {
        r.emplace_back("warning", "gamma_qp * t_star >= 0.1; the readout approximation degrades");
    }
    b.plot.series = {{"current", run.times, run.current}};
    b.plot.x_label = "time (1/E_J)";
    b.plot.y_label = "current (e/T)";
}

FigureOptions figure_options(const RunConfig& c) {
    FigureOptions o;
    if (c.lengths) {
        o.lengths = c.lengths;
    } else if (c.length) {
        o.lengths = std::vector<int>{*c.length};
    }
    o.u0 = c.u0;
    if (c.c_ratios) {
        o.c_ratios = c.c_ratios;
    } else if (c.c_ratio) {
        o.c_ratios = std::vector<double>{*c.c_ratio};
    }
    o.gamma = c.gamma;
    o.gamma_qp = c.gamma_qp;
    o.bond_sigma = c.bond_sigma;
    o.charge_sigma = c.charge_sigma;
    o.realizations = c.realizations;
    o.seed = c.seed;
    o.t_max = c.t_max;
    o.dt = c.dt;
    o.threshold = c.threshold;
    o.theta = c.theta;
    o.phi = c.phi;
    o.t_star_max = c.t_star_max;
    o.t_star_step = c.t_star_step;
    o.threads = c.threads.value_or(0);
    o.svg = true;
    return o;
}

} // namespace

std::vector<std::string> execute(const RunConfig& config, const std::string& command_line) {
    validate(config);
    const std::string config_text = to_config_text(config);
    std::vector<std::string> files;
    if (config.subcommand == Subcommand::reproduce) {
        const auto bundle = reproduce_figure(parse_figure_name(*config.figure), figure_options(config),
                                             config.output, config_text);
        for (const auto& f : bundle.files) {
            files.push_back(f.string());
        }
        return files;
    }

    Bundle b;
    b.meta.command = command_line;
    b.meta.config_text = config_text;
    b.meta.seed = config.seed.value_or(0);
    b.plot.title = subcommand_name(config.subcommand);
    switch (config.subcommand) {
    case Subcommand::fidelity_series: fidelity_series_command(config, b); break;
    case Subcommand::sweep_length: sweep_length_command(config, b); break;
    case Subcommand::disorder_ensemble: disorder_command(config, b); break;
    case Subcommand::dephasing: dephasing_command(config, b); break;
    case Subcommand::readout: readout_command(config, b); break;
    case Subcommand::reproduce: break;
    }

    const std::string stem = subcommand_name(config.subcommand);
    const fs::path csv = config.output / (stem + ".csv");
    write_csv(b.table, csv);
    files.push_back(csv.string());
    if (config.format == OutputFormat::csv_svg) {
        const fs::path svg = config.output / (stem + ".svg");
        write_svg(b.plot, svg);
        files.push_back(svg.string());
    }
    const fs::path meta = config.output / (stem + ".meta.json");
    write_metadata(b.meta, meta);
    files.push_back(meta.string());
    return files;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string command_line;
    for (std::size_t i = 0; i < args.size(); ++i) {
        command_line += (i ? " " : "") + args[i];
    }
    try {
        const auto config = parse_config(args);
        if (!config) {
            return exit_ok;
        }
        for (const auto& f : execute(*config, command_line)) {
            std::cout << f << "\n";
        }
        return exit_ok;
    } catch (const InvalidArgument& e) {
        std::cerr << "jjchain: configuration error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const NumericalError& e) {
        std::cerr << "jjchain: numerical failure: " << e.what() << "\n";
        return exit_numerical_error;
    } catch (const std::exception& e) {
        std::cerr << "jjchain: " << e.what() << "\n";
        return exit_io_error;
    }
}

} // namespace jjchain
