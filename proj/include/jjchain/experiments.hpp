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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jjchain/hamiltonian.hpp"
#include "jjchain/output.hpp"
#include "jjchain/peaks.hpp"

namespace jjchain {

struct SweepSpec {
    std::vector<int> lengths{7};
    double u0 = 10.0;
    std::vector<double> c_ratios{0.1};
    std::optional<double> gamma;
    std::optional<double> gamma_qp;
    std::optional<DisorderSpec> disorder;
    int realizations = 500;
    double t_max = 0.0; ///< 0 selects 50 L per chain
    double dt = 0.01;
    std::optional<double> threshold;
    std::uint64_t master_seed = 0;

    void validate() const;
    double window(int length) const { return t_max > 0.0 ? t_max : 50.0 * length; }
};

struct EnsembleStats {
    std::vector<double> mean;
    std::vector<double> std_error; ///< sample std / sqrt(n)
    int n = 0;
};

/// Pairwise (cascade) summation; result depends only on the input order.
double pairwise_sum(std::span<const double> values);

/// samples[r][k]: realization r, observable k.
EnsembleStats aggregate(const std::vector<std::vector<double>>& samples);

/// Runs fn(i) for i in [0, count) on up to threads workers (0 = hardware
/// concurrency) and collects results by index.
template <typename T>
std::vector<T> parallel_map(std::size_t count, int threads, const std::function<T(std::size_t)>& fn);

struct LengthSweepRow {
    int length = 0;
    double c_ratio = 0.0;
    std::optional<PeakResult> first;
    std::optional<PeakResult> above_threshold;
    std::string status = "ok";
};

/// Clean chains only. Peak-search failures are recorded per row.
std::vector<LengthSweepRow> run_length_sweep(const SweepSpec& spec, int threads = 0);

struct DisorderEnsemble {
    std::vector<double> times;
    EnsembleStats fidelity;   ///< mean F(t) over realizations
    EnsembleStats first_peak; ///< single entry: first-maximum fidelity
    EnsembleStats first_peak_time;
    std::vector<double> first_peak_values; ///< by realization, NaN where none was found
    int failed_peaks = 0;
};

/// Single length and c_ratio. Realization r uses sample_disorder with seed
/// master_seed and index r.
DisorderEnsemble run_disorder_ensemble(const SweepSpec& spec, int threads = 0);

Table length_sweep_table(const std::vector<LengthSweepRow>& rows);

enum class FigureName { fig2, fig3, fig4, fig5, fig6 };

FigureName parse_figure_name(const std::string& name);
std::string figure_label(FigureName name);

/// Values left unset fall back to the figure's defaults.
struct FigureOptions {
    std::optional<std::vector<int>> lengths;
    std::optional<double> u0;
    std::optional<std::vector<double>> c_ratios;
    std::optional<double> gamma;
    std::optional<double> gamma_qp;
    std::optional<double> bond_sigma;
    std::optional<double> charge_sigma;
    std::optional<int> realizations;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_max;
    std::optional<double> dt;
    std::optional<double> threshold;
    std::optional<double> theta;
    std::optional<double> phi;
    std::optional<double> t_star_max;
    std::optional<double> t_star_step;
    int threads = 0;
    bool svg = true;
};

struct FigureBundle {
    FigureName name;
    std::vector<std::filesystem::path> files;
    Table table;
    Metadata metadata;
};

/// Runs one figure pipeline and writes <dir>/<fig>.csv, .svg and .meta.json.
/// config_text is echoed into the metadata sidecar.
FigureBundle reproduce_figure(FigureName name, const FigureOptions& options,
                              const std::filesystem::path& output_dir,
                              const std::string& config_text = {});

} // namespace jjchain

#include "jjchain/detail/parallel_map.hpp"
