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
#include <optional>
#include <string>
#include <vector>

#include "jjchain/types.hpp"

namespace jjchain {

/// Bad flag, bad config key, type mismatch or violated invariant. Exit code 2.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

enum class Subcommand { fidelity_series, sweep_length, disorder_ensemble, dephasing, readout, reproduce };
enum class OutputFormat { csv, csv_svg };

std::string subcommand_name(Subcommand s);

/// Everything a run needs. Unset optionals take the subcommand's defaults.
/// Config-file sections: [chain] [time] [noise] [readout] [sweep] [output].
struct RunConfig {
    Subcommand subcommand = Subcommand::fidelity_series;
    std::optional<std::string> figure; ///< reproduce only

    // [chain]
    std::optional<int> length;
    std::optional<double> u0;
    std::optional<double> c_ratio;
    std::optional<std::vector<double>> qx;
    std::optional<std::vector<double>> ej_bonds;
    // [time]
    std::optional<double> t_max;
    std::optional<double> dt;
    // [noise]
    std::optional<double> gamma;
    // [readout]
    std::optional<double> gamma_qp;
    std::optional<double> t_star;
    std::optional<double> t_pulse;
    std::optional<double> t_tail;
    std::optional<double> theta;
    std::optional<double> phi;
    std::optional<double> t_star_max;
    std::optional<double> t_star_step;
    // [sweep]
    std::optional<std::vector<int>> lengths;
    std::optional<std::vector<double>> c_ratios;
    std::optional<double> threshold;
    std::optional<int> realizations;
    std::optional<std::uint64_t> seed;
    std::optional<double> bond_sigma;
    std::optional<double> charge_sigma;
    std::optional<int> threads;
    // [output]
    std::filesystem::path output = ".";
    OutputFormat format = OutputFormat::csv;

    bool operator==(const RunConfig&) const = default;
};

/// Environment variable naming the default output directory.
inline constexpr const char* output_dir_env = "JJCHAIN_OUTPUT_DIR";

/// Parses argv (argv[0] is the program name). Flags override --config file
/// values; unknown flags or keys are errors. Validates before returning.
/// Returns std::nullopt when help was requested (text written to stdout).
std::optional<RunConfig> parse_config(const std::vector<std::string>& argv);

/// Throws ConfigError naming the field and the constraint.
void validate(const RunConfig& config);

/// Sectioned key = value text accepted by --config.
std::string to_config_text(const RunConfig& config);

} // namespace jjchain
