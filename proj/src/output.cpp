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

#include "jjchain/output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#ifndef JJCHAIN_VERSION
#define JJCHAIN_VERSION "0.0.0"
#endif

namespace jjchain {

std::string version() { return JJCHAIN_VERSION; }

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buf{};
    // Shortest round-trip digits; large magnitudes go scientific so fixed notation never
    // spells out the exact binary integer.
    const auto format = std::abs(value) >= 1e15 ? std::chars_format::scientific : std::chars_format{};
    auto [end, ec] = format == std::chars_format{}
                         ? std::to_chars(buf.data(), buf.data() + buf.size(), value)
                         : std::to_chars(buf.data(), buf.data() + buf.size(), value, format);
    if (ec != std::errc()) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf.data(), end);
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("Table::add_row: expected " + std::to_string(columns.size()) +
                                    " cells, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
}

namespace {

std::string cell_text(const Cell& cell) {
    struct Visitor {
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) {
                return s;
            }
            std::string quoted = "\"";
            for (char c : s) {
                if (c == '"') {
                    quoted += '"';
                }
                quoted += c;
            }
            return quoted + "\"";
        }
    };
    return std::visit(Visitor{}, cell);
}

void write_text(const std::string& text, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

} // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out += (c ? "," : "") + table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) {
                out += ',';
            }
            out += cell_text(row[c]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const Table& table, const std::filesystem::path& path) { write_text(to_csv(table), path); }

std::string render_svg(const Plot& plot) {
    constexpr double width = 720, height = 440;
    constexpr double left = 70, right = 160, top = 40, bottom = 55;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                continue;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    }
    if (xmax == xmin) {
        xmax = xmin + 1;
    }
    if (ymax == ymin) {
        ymax = ymin + 1;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    static constexpr std::array<const char*, 6> colours = {"#1f77b4", "#d62728", "#2ca02c",
                                                           "#ff7f0e", "#9467bd", "#8c564b"};
    std::ostringstream svg;
    svg.precision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << plot.title << "</text>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        svg << "<text x=\"" << px(fx) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << fx
            << "</text>\n";
        svg << "<text x=\"" << left - 6 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">" << fy
            << "</text>\n";
    }
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
        << plot.x_label << "</text>\n";
    svg << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << plot.y_label << "</text>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* colour = colours[k % colours.size()];
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                svg << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            }
        }
        svg << "\"/>\n";
        const double ly = top + 14 + 18.0 * k;
        svg << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36
            << "\" y2=\"" << ly << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_svg(const Plot& plot, const std::filesystem::path& path) { write_text(render_svg(plot), path); }

std::string render_metadata(const Metadata& meta) {
    nlohmann::ordered_json j;
    j["artifact"] = "jjchain";
    j["version"] = version();
    j["command"] = meta.command;
    j["seed"] = meta.seed;
    const auto now = std::chrono::system_clock::now();
    j["created_unix_seconds"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    j["config"] = meta.config_text;
    auto& assumptions = j["assumptions"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta.assumptions) {
        assumptions[k] = v;
    }
    auto& results = j["results"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta.results) {
        results[k] = v;
    }
    return j.dump(2) + "\n";
}

void write_metadata(const Metadata& meta, const std::filesystem::path& path) {
    write_text(render_metadata(meta), path);
}

} // namespace jjchain
