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
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace jjchain {

/// Shortest decimal that round-trips, capped at 17 significant digits.
std::string format_double(double value);

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

/// Header line, fixed column order, LF endings.
std::string to_csv(const Table& table);
void write_csv(const Table& table, const std::filesystem::path& path);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

std::string render_svg(const Plot& plot);
void write_svg(const Plot& plot, const std::filesystem::path& path);

/// Sidecar describing how a result was produced. Timestamps live only here.
struct Metadata {
    std::string command;
    std::string config_text; ///< fully resolved configuration, re-parseable
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> assumptions;
    std::vector<std::pair<std::string, std::string>> results;
};

std::string render_metadata(const Metadata& meta);
void write_metadata(const Metadata& meta, const std::filesystem::path& path);

std::string version();

} // namespace jjchain
