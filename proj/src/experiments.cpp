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

#include "jjchain/experiments.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "jjchain/dephasing.hpp"
#include "jjchain/readout.hpp"
#include "jjchain/transfer.hpp"

namespace jjchain {

void SweepSpec::validate() const {
    detail::require(!lengths.empty(), "lengths: at least one length required");
    for (int L : lengths) {
        detail::require(L >= 1, "lengths: each L >= 1 required");
    }
    detail::require(std::isfinite(u0) && u0 >= 0.0, "u0: must be finite and >= 0");
    detail::require(!c_ratios.empty(), "c_ratios: at least one value required");
    for (double c : c_ratios) {
        detail::require(std::isfinite(c) && c >= 0.0, "c_ratios: each value must be >= 0");
    }
    detail::require(realizations >= 1, "realizations: must be >= 1");
    detail::require(std::isfinite(t_max) && t_max >= 0.0, "t_max: must be >= 0");
    detail::require(std::isfinite(dt) && dt > 0.0, "dt: must be > 0");
    if (threshold) {
        detail::require(*threshold > 0.5 && *threshold < 1.0, "threshold: must lie in (0.5, 1)");
    }
    if (gamma) {
        detail::require(*gamma >= 0.0, "gamma: must be >= 0");
    }
    if (gamma_qp) {
        detail::require(*gamma_qp > 0.0, "gamma_qp: must be > 0");
    }
    if (disorder) {
        disorder->validate();
    }
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) {
            s += v;
        }
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EnsembleStats aggregate(const std::vector<std::vector<double>>& samples) {
    EnsembleStats stats;
    stats.n = static_cast<int>(samples.size());
    if (samples.empty()) {
        return stats;
    }
    const std::size_t width = samples.front().size();
    stats.mean.assign(width, 0.0);
    stats.std_error.assign(width, 0.0);
    std::vector<double> column(samples.size());
    for (std::size_t k = 0; k < width; ++k) {
        for (std::size_t r = 0; r < samples.size(); ++r) {
            column[r] = samples[r].at(k);
        }
        // Shift by the first sample so identical inputs give an exact mean and zero spread.
        const double shift = column.front();
        for (double& v : column) {
            v -= shift;
        }
        const double offset = pairwise_sum(column) / static_cast<double>(samples.size());
        stats.mean[k] = shift + offset;
        if (samples.size() > 1) {
            for (double& v : column) {
                v = (v - offset) * (v - offset);
            }
            const double var = pairwise_sum(column) / static_cast<double>(samples.size() - 1);
            stats.std_error[k] = std::sqrt(var / static_cast<double>(samples.size()));
        }
    }
    return stats;
}

std::vector<LengthSweepRow> run_length_sweep(const SweepSpec& spec, int threads) {
    spec.validate();
    detail::require(!spec.disorder, "run_length_sweep: clean chains only (disorder given)");

    struct Point {
        int length;
        double c_ratio;
    };
    std::vector<Point> points;
    for (double c : spec.c_ratios) {
        for (int L : spec.lengths) {
            points.push_back({L, c});
        }
    }

    return parallel_map<LengthSweepRow>(points.size(), threads, [&](std::size_t i) {
        LengthSweepRow row;
        row.length = points[i].length;
        row.c_ratio = points[i].c_ratio;
        try {
            const auto h = build_hamiltonian(ChainParams::uniform(row.length, spec.u0, row.c_ratio));
            const Propagator prop(h);
            const auto series = fidelity_series(prop, spec.window(row.length), spec.dt);
            try {
                row.first = find_first_maximum(series, prop);
            } catch (const NumericalError& e) {
                row.status = std::string("first maximum: ") + e.what();
            }
            if (spec.threshold) {
                try {
                    row.above_threshold = find_first_above_threshold(series, prop, *spec.threshold);
                } catch (const NumericalError& e) {
                    row.status = std::string("threshold: ") + e.what();
                }
            }
        } catch (const NumericalError& e) {
            row.status = e.what();
        }
        return row;
    });
}

DisorderEnsemble run_disorder_ensemble(const SweepSpec& spec, int threads) {
    spec.validate();
    detail::require(spec.disorder.has_value(), "run_disorder_ensemble: disorder spec required");
    detail::require(spec.lengths.size() == 1 && spec.c_ratios.size() == 1,
                    "run_disorder_ensemble: exactly one length and one c_ratio");

    const int L = spec.lengths.front();
    const ChainParams base = ChainParams::uniform(L, spec.u0, spec.c_ratios.front());
    const CapacitanceModel model = build_capacitance_model(L, base.c_ratio);
    DisorderSpec disorder = *spec.disorder;
    disorder.seed = spec.master_seed;

    const double t_max = spec.window(L);
    // The first-peak search always looks at least 50 L ahead.
    const double search = std::max(t_max, 50.0 * L);
    const auto n_keep = static_cast<std::size_t>(std::floor(t_max / spec.dt + 1e-9)) + 1;

    struct Sample {
        std::vector<double> fidelity;
        std::optional<PeakResult> peak;
    };
    const auto samples = parallel_map<Sample>(
        static_cast<std::size_t>(spec.realizations), threads, [&](std::size_t r) {
            const ChainParams params = sample_disorder(disorder, base, r);
            const Propagator prop(build_hamiltonian(params, model));
            const auto series = fidelity_series(prop, search, spec.dt);
            Sample s;
            s.fidelity.assign(series.fidelity.begin(), series.fidelity.begin() + n_keep);
            try {
                s.peak = find_first_maximum(series, prop);
            } catch (const NoPeakFound&) {
            }
            return s;
        });

    DisorderEnsemble out;
    out.times.resize(n_keep);
    for (std::size_t k = 0; k < n_keep; ++k) {
        out.times[k] = static_cast<double>(k) * spec.dt;
    }
    std::vector<std::vector<double>> traces, peaks, peak_times;
    for (const auto& s : samples) {
        traces.push_back(s.fidelity);
        if (s.peak) {
            peaks.push_back({s.peak->f_peak});
            peak_times.push_back({s.peak->t_peak});
            out.first_peak_values.push_back(s.peak->f_peak);
        } else {
            ++out.failed_peaks;
            out.first_peak_values.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    out.fidelity = aggregate(traces);
    out.first_peak = aggregate(peaks);
    out.first_peak_time = aggregate(peak_times);
    return out;
}

Table length_sweep_table(const std::vector<LengthSweepRow>& rows) {
    Table table;
    table.columns = {"length", "c_ratio", "t_peak", "f_peak", "t_threshold", "f_threshold", "status"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : rows) {
        table.add_row({static_cast<long long>(r.length), r.c_ratio, r.first ? r.first->t_peak : nan,
                       r.first ? r.first->f_peak : nan,
                       r.above_threshold ? r.above_threshold->t_peak : nan,
                       r.above_threshold ? r.above_threshold->f_peak : nan, r.status});
    }
    return table;
}

FigureName parse_figure_name(const std::string& name) {
    if (name == "fig2") return FigureName::fig2;
    if (name == "fig3") return FigureName::fig3;
    if (name == "fig4") return FigureName::fig4;
    if (name == "fig5") return FigureName::fig5;
    if (name == "fig6") return FigureName::fig6;
    throw InvalidArgument("unknown figure name '" + name + "' (expected fig2..fig6)");
}

std::string figure_label(FigureName name) {
    switch (name) {
    case FigureName::fig2: return "fig2";
    case FigureName::fig3: return "fig3";
    case FigureName::fig4: return "fig4";
    case FigureName::fig5: return "fig5";
    case FigureName::fig6: return "fig6";
    }
    return "unknown";
}

namespace {

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + format_double(v[i]);
    }
    return s;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + std::to_string(v[i]);
    }
    return s;
}

std::vector<int> range(int lo, int hi) {
    std::vector<int> v;
    for (int L = lo; L <= hi; ++L) {
        v.push_back(L);
    }
    return v;
}

void length_figure(FigureBundle& bundle, const FigureOptions& o, std::vector<double> default_ratios,
                   std::optional<double> default_threshold, double window_per_site, Plot& plot) {
    SweepSpec spec;
    spec.lengths = o.lengths.value_or(range(2, 10));
    spec.u0 = o.u0.value_or(10.0);
    spec.c_ratios = o.c_ratios.value_or(default_ratios);
    spec.dt = o.dt.value_or(0.01);
    spec.threshold = o.threshold ? o.threshold : default_threshold;
    spec.t_max = o.t_max.value_or(0.0);

    std::vector<LengthSweepRow> rows;
    if (spec.t_max > 0.0) {
        rows = run_length_sweep(spec, o.threads);
    } else {
        // Window grows with L; run per length.
        for (int L : spec.lengths) {
            SweepSpec one = spec;
            one.lengths = {L};
            one.t_max = window_per_site * L;
            for (auto& r : run_length_sweep(one, o.threads)) {
                rows.push_back(r);
            }
        }
        std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            return a.c_ratio < b.c_ratio || (a.c_ratio == b.c_ratio && a.length < b.length);
        });
    }
    bundle.table = length_sweep_table(rows);

    auto& a = bundle.metadata.assumptions;
    a.emplace_back("lengths", join(spec.lengths));
    a.emplace_back("u0", format_double(spec.u0));
    a.emplace_back("c_ratios", join(spec.c_ratios) + " (unstated in the source figure; chosen values)");
    a.emplace_back("dt", format_double(spec.dt));
    a.emplace_back("t_max", spec.t_max > 0.0 ? format_double(spec.t_max)
                                             : format_double(window_per_site) + " * L");
    a.emplace_back("threshold", spec.threshold ? format_double(*spec.threshold) : "none");
    a.emplace_back("first_maximum", "best fidelity peak inside the first arrival lobe of |f| (|f| >= 0.05)");

    for (double c : spec.c_ratios) {
        PlotSeries first{"first max, C/C0=" + format_double(c), {}, {}};
        PlotSeries thr{"threshold max, C/C0=" + format_double(c), {}, {}};
        for (const auto& r : rows) {
            if (r.c_ratio != c) {
                continue;
            }
            if (r.first) {
                first.x.push_back(r.length);
                first.y.push_back(r.first->f_peak);
            }
            if (r.above_threshold) {
                thr.x.push_back(r.length);
                thr.y.push_back(r.above_threshold->f_peak);
            }
        }
        plot.series.push_back(first);
        if (spec.threshold) {
            plot.series.push_back(thr);
        }
    }
    plot.x_label = "chain length L";
    plot.y_label = "fidelity at maximum";
}

void disorder_figure(FigureBundle& bundle, const FigureOptions& o, Plot& plot) {
    SweepSpec spec;
    spec.lengths = {o.lengths ? o.lengths->front() : 7};
    spec.u0 = o.u0.value_or(10.0);
    spec.c_ratios = {o.c_ratios ? o.c_ratios->front() : 0.0};
    spec.realizations = o.realizations.value_or(500);
    spec.master_seed = o.seed.value_or(0);
    spec.dt = o.dt.value_or(0.01);
    spec.t_max = o.t_max.value_or(30.0);
    const double bond = o.bond_sigma.value_or(0.1);
    const double charge = o.charge_sigma.value_or(0.025);

    SweepSpec bond_spec = spec;
    bond_spec.disorder = DisorderSpec{bond, 0.0, 0};
    SweepSpec charge_spec = spec;
    charge_spec.disorder = DisorderSpec{0.0, charge, 0};
    const auto bond_run = run_disorder_ensemble(bond_spec, o.threads);
    const auto charge_run = run_disorder_ensemble(charge_spec, o.threads);
    const auto clean = fidelity_series(
        build_hamiltonian(ChainParams::uniform(spec.lengths.front(), spec.u0, spec.c_ratios.front())),
        spec.t_max, spec.dt);

    bundle.table.columns = {"t", "clean", "bond_mean", "bond_stderr", "charge_mean", "charge_stderr"};
    for (std::size_t k = 0; k < bond_run.times.size(); ++k) {
        bundle.table.add_row({bond_run.times[k], clean.fidelity[k], bond_run.fidelity.mean[k],
                              bond_run.fidelity.std_error[k], charge_run.fidelity.mean[k],
                              charge_run.fidelity.std_error[k]});
    }

    auto& a = bundle.metadata.assumptions;
    a.emplace_back("length", std::to_string(spec.lengths.front()));
    a.emplace_back("u0", format_double(spec.u0));
    a.emplace_back("c_ratio", format_double(spec.c_ratios.front()));
    a.emplace_back("bond_sigma", format_double(bond) + " (relative standard deviation of E_J)");
    a.emplace_back("charge_sigma", format_double(charge) + " (standard deviation of q_x, units of 2e)");
    a.emplace_back("realizations", std::to_string(spec.realizations) + " (ensemble mean; 1 emulates a single trace)");
    a.emplace_back("t_max", format_double(spec.t_max));
    a.emplace_back("dt", format_double(spec.dt));
    auto& res = bundle.metadata.results;
    auto stats = [&](const std::string& tag, const DisorderEnsemble& e) {
        if (e.first_peak.n > 0) {
            res.emplace_back(tag + "_first_peak_mean", format_double(e.first_peak.mean[0]));
            res.emplace_back(tag + "_first_peak_stderr", format_double(e.first_peak.std_error[0]));
        }
        res.emplace_back(tag + "_first_peak_n", std::to_string(e.first_peak.n));
    };
    stats("bond", bond_run);
    stats("charge", charge_run);
    bundle.metadata.seed = spec.master_seed;

    plot.series = {{"clean", bond_run.times, clean.fidelity},
                   {"bond disorder", bond_run.times, bond_run.fidelity.mean},
                   {"charge disorder", charge_run.times, charge_run.fidelity.mean}};
    plot.x_label = "time (1/E_J)";
    plot.y_label = "fidelity";
}

void noise_figure(FigureBundle& bundle, const FigureOptions& o, Plot& plot) {
    const int L = o.lengths ? o.lengths->front() : 7;
    const double u0 = o.u0.value_or(10.0);
    const double c = o.c_ratios ? o.c_ratios->front() : 0.1;
    const double gamma = o.gamma.value_or(0.01);
    const double t_max = o.t_max.value_or(100.0);
    const double dt = o.dt.value_or(0.002);

    const ChainParams params = ChainParams::uniform(L, u0, c);
    const auto model = build_capacitance_model(L, c);
    const auto h = build_hamiltonian(params, model);
    DephasingOptions opts;
    opts.t_max = t_max;
    opts.dt = dt;
    opts.sample_dt = std::max(0.01, dt);
    opts.keep_states = false;
    const auto rho0 = input_state(L, 0.5 * std::numbers::pi, 0.0);
    const auto noisy = evolve_dephasing(rho0, h, build_dephasing_rates(gamma, model), opts);
    const Propagator clean(h);

    bundle.table.columns = {"t", "fidelity", "fidelity_noiseless", "stationary", "rho_LL", "trace_error",
                            "min_eigenvalue"};
    std::vector<double> clean_f;
    for (std::size_t k = 0; k < noisy.times.size(); ++k) {
        clean_f.push_back(fidelity_closed_form(clean.transfer(noisy.times[k])));
        bundle.table.add_row({noisy.times[k], noisy.fidelity[k], clean_f.back(), stationary_fidelity(L),
                              noisy.rho_LL[k], noisy.diagnostics[k].trace_error,
                              noisy.diagnostics[k].min_eigenvalue});
    }
    auto& a = bundle.metadata.assumptions;
    a.emplace_back("length", std::to_string(L));
    a.emplace_back("u0", format_double(u0) +
                             " (read as (2e)^2/(E_J C0); one caption variant writes e^2/(E_J C0))");
    a.emplace_back("c_ratio", format_double(c));
    a.emplace_back("gamma", format_double(gamma) + " (on-site dephasing rate gamma/2 for C/C0 -> 0)");
    a.emplace_back("dt", format_double(dt));
    a.emplace_back("input_state", "theta=pi/2, phi=0 probe; fidelity via channel linearity");

    plot.series = {{"with gate noise", noisy.times, noisy.fidelity},
                   {"noiseless", noisy.times, clean_f}};
    plot.x_label = "time (1/E_J)";
    plot.y_label = "fidelity";
}

void readout_figure(FigureBundle& bundle, const FigureOptions& o, Plot& plot) {
    const int L = o.lengths ? o.lengths->front() : 7;
    const double u0 = o.u0.value_or(10.0);
    const double c = o.c_ratios ? o.c_ratios->front() : 0.1;
    const double gamma_qp = o.gamma_qp.value_or(0.05);
    const double theta = o.theta.value_or(std::numbers::pi);
    const double phi = o.phi.value_or(0.0);
    const double t_star_max = o.t_star_max.value_or(40.0);
    const double t_star_step = o.t_star_step.value_or(0.05);
    ReadoutParams rp;
    rp.gamma_qp = gamma_qp;
    rp.dt = o.dt.value_or(0.01);

    std::vector<double> grid;
    const auto n = static_cast<long>(std::floor(t_star_max / t_star_step + 1e-9));
    for (long k = 0; k <= n; ++k) {
        grid.push_back(static_cast<double>(k) * t_star_step);
    }
    const ChainParams params = ChainParams::uniform(L, u0, c);
    const auto rows = current_vs_tstar_sweep(params, gamma_qp, grid, theta, phi, rp);

    bundle.table.columns = {"t_star", "integrated_current", "approx_integrated_current",
                            "fidelity_isolated", "rho_LL", "p_qp"};
    PlotSeries current{"integrated current (e/T)", {}, {}};
    PlotSeries fidelity{"fidelity, isolated chain", {}, {}};
    for (const auto& r : rows) {
        bundle.table.add_row({r.t_star, r.integrated_current, r.approx_integrated_current, r.fidelity_isolated,
                              r.rho_LL, r.p_qp});
        current.x.push_back(r.t_star);
        current.y.push_back(r.integrated_current);
        fidelity.x.push_back(r.t_star);
        fidelity.y.push_back(r.fidelity_isolated);
    }

    auto& a = bundle.metadata.assumptions;
    a.emplace_back("length", std::to_string(L));
    a.emplace_back("u0", format_double(u0));
    a.emplace_back("c_ratio", format_double(c));
    a.emplace_back("gamma_qp", format_double(gamma_qp));
    a.emplace_back("theta", format_double(theta));
    a.emplace_back("phi", format_double(phi));
    a.emplace_back("t_star_grid", "0:" + format_double(t_star_step) + ":" + format_double(t_star_max));
    a.emplace_back("t_tail", format_double(rp.tail()));
    a.emplace_back("current_curve", "integrated current vs disconnection time; instantaneous trace in "
                                    "fig6_instantaneous.csv");
    auto& res = bundle.metadata.results;
    const auto pairs = align_current_peaks(rows);
    for (std::size_t i = 0; i < pairs.size() && i < 3; ++i) {
        res.emplace_back("current_peak_" + std::to_string(i + 1),
                         format_double(pairs[i].current_time) + " (nearest fidelity peak " +
                             format_double(pairs[i].fidelity_time) + ")");
    }
    plot.series = {current, fidelity};
    plot.x_label = "disconnection time t* (1/E_J)";
    plot.y_label = "current (e/T) / fidelity";
}

} // namespace

FigureBundle reproduce_figure(FigureName name, const FigureOptions& options,
                              const std::filesystem::path& output_dir, const std::string& config_text) {
    FigureBundle bundle;
    bundle.name = name;
    bundle.metadata.command = "reproduce " + figure_label(name);
    bundle.metadata.config_text = config_text;
    Plot plot;
    plot.title = figure_label(name);

    switch (name) {
    case FigureName::fig2:
        length_figure(bundle, options, {0.05, 0.1}, std::nullopt, 50.0, plot);
        break;
    case FigureName::fig3:
        length_figure(bundle, options, {1.0, 2.0, 5.0}, 0.9, 500.0, plot);
        break;
    case FigureName::fig4:
        disorder_figure(bundle, options, plot);
        break;
    case FigureName::fig5:
        noise_figure(bundle, options, plot);
        break;
    case FigureName::fig6:
        readout_figure(bundle, options, plot);
        break;
    }

    const std::string stem = figure_label(name);
    const auto csv = output_dir / (stem + ".csv");
    write_csv(bundle.table, csv);
    bundle.files.push_back(csv);
    if (options.svg) {
        const auto svg = output_dir / (stem + ".svg");
        write_svg(plot, svg);
        bundle.files.push_back(svg);
    }
    if (name == FigureName::fig6) {
        // Instantaneous current with the chain left connected.
        const int L = options.lengths ? options.lengths->front() : 7;
        ReadoutParams rp;
        rp.gamma_qp = options.gamma_qp.value_or(0.05);
        rp.t_star = options.t_star_max.value_or(40.0);
        rp.t_tail = 20.0 / rp.gamma_qp;
        rp.dt = options.dt.value_or(0.01);
        const auto run = evolve_readout(options.theta.value_or(std::numbers::pi), options.phi.value_or(0.0),
                                        ChainParams::uniform(L, options.u0.value_or(10.0),
                                                             options.c_ratios ? options.c_ratios->front() : 0.1),
                                        rp);
        Table inst;
        inst.columns = {"t", "current", "p_vac", "p_qp", "rho_LL"};
        for (std::size_t k = 0; k < run.times.size(); ++k) {
            inst.add_row({run.times[k], run.current[k], run.p_vac[k], run.p_qp[k], run.rho_LL[k]});
        }
        const auto path = output_dir / "fig6_instantaneous.csv";
        write_csv(inst, path);
        bundle.files.push_back(path);
    }
    const auto meta = output_dir / (stem + ".meta.json");
    write_metadata(bundle.metadata, meta);
    bundle.files.push_back(meta);
    return bundle;
}

} // namespace jjchain
