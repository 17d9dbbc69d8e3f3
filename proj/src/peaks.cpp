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

#include "jjchain/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

namespace jjchain {

namespace {

template <typename Better>
std::vector<std::size_t> extrema(std::span<const double> v, Better better) {
    std::vector<std::size_t> out;
    const std::size_t n = v.size();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!better(v[k], v[k - 1])) {
            continue;
        }
        std::size_t j = k + 1;
        while (j < n && v[j] == v[k]) {
            ++j;
        }
        if (j < n && better(v[k], v[j])) {
            out.push_back(k);
        }
    }
    return out;
}

} // namespace

std::vector<std::size_t> local_maxima(std::span<const double> values) {
    return extrema(values, [](double a, double b) { return a > b; });
}

std::vector<std::size_t> local_minima(std::span<const double> values) {
    return extrema(values, [](double a, double b) { return a < b; });
}

std::vector<std::size_t> prominent_peaks(std::span<const double> values, double min_prominence) {
    std::vector<std::size_t> out;
    const std::size_t n = values.size();
    for (std::size_t k : local_maxima(values)) {
        const double height = values[k];
        double left_base = height;
        for (std::size_t i = k; i-- > 0;) {
            if (values[i] > height) {
                break;
            }
            left_base = std::min(left_base, values[i]);
        }
        double right_base = height;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (values[i] > height) {
                break;
            }
            right_base = std::min(right_base, values[i]);
        }
        if (height - std::max(left_base, right_base) >= min_prominence) {
            out.push_back(k);
        }
    }
    return out;
}

namespace {

struct Lobe {
    std::size_t begin; // inclusive
    std::size_t end;   // inclusive
};

std::vector<Lobe> arrival_lobes(const FidelitySeries& series, double floor) {
    std::vector<double> modulus(series.size());
    std::transform(series.amplitude.begin(), series.amplitude.end(), modulus.begin(),
                   [](Complex f) { return std::abs(f); });
    const auto maxima = local_maxima(modulus);

    std::vector<Lobe> lobes;
    for (std::size_t m = 0; m < maxima.size(); ++m) {
        if (modulus[maxima[m]] < floor) {
            continue;
        }
        std::size_t begin = 0;
        if (m > 0) {
            auto it = std::min_element(modulus.begin() + maxima[m - 1], modulus.begin() + maxima[m]);
            begin = static_cast<std::size_t>(it - modulus.begin());
        }
        std::size_t end = series.size() - 1;
        if (m + 1 < maxima.size()) {
            auto it = std::min_element(modulus.begin() + maxima[m], modulus.begin() + maxima[m + 1]);
            end = static_cast<std::size_t>(it - modulus.begin());
        }
        lobes.push_back({begin, end});
    }
    return lobes;
}

PeakResult refine(const FidelitySeries& series, const Propagator& propagator, std::size_t k) {
    const double centre = series.times[k];
    const double lo = series.times[k - 1] - centre;
    const double hi = series.times[k + 1] - centre;
    auto objective = [&](double s) {
        return -fidelity_closed_form(propagator.transfer(centre + s));
    };
    const auto [s_best, neg_f] =
        boost::math::tools::brent_find_minima(objective, lo, hi, std::numeric_limits<double>::digits / 2);

    PeakResult peak;
    peak.t_peak = centre + s_best;
    peak.amplitude = propagator.transfer(peak.t_peak);
    peak.f_peak = -neg_f;
    if (peak.f_peak < series.fidelity[k]) {
        // Brent never returns worse than its best probe, but keep the grid
        // point if rounding says otherwise.
        peak.t_peak = centre;
        peak.amplitude = series.amplitude[k];
        peak.f_peak = series.fidelity[k];
    }
    return peak;
}

// Best refined fidelity maximum strictly inside the lobe, if any.
std::optional<PeakResult> best_in_lobe(const FidelitySeries& series, const Propagator& propagator,
                                       const std::vector<std::size_t>& fidelity_maxima,
                                       const Lobe& lobe) {
    std::optional<std::size_t> best;
    for (std::size_t k : fidelity_maxima) {
        if (k < lobe.begin || k > lobe.end) {
            continue;
        }
        if (!best || series.fidelity[k] > series.fidelity[*best]) {
            best = k;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    return refine(series, propagator, *best);
}

void check_series(const FidelitySeries& series, const Propagator& propagator) {
    detail::require(series.size() >= 3, "peak search: series needs at least 3 points");
    detail::require(series.amplitude.size() == series.size() && series.fidelity.size() == series.size(),
                    "peak search: inconsistent series");
    detail::require(propagator.length() >= 1, "peak search: empty propagator");
}

} // namespace

PeakResult find_first_maximum(const FidelitySeries& series, const Propagator& propagator,
                              const PeakOptions& options) {
    check_series(series, propagator);
    const auto lobes = arrival_lobes(series, options.arrival_floor);
    if (lobes.empty()) {
        throw NoPeakFound("no interior maximum: transfer amplitude never peaks within t_max");
    }
    const auto maxima = local_maxima(series.fidelity);
    auto peak = best_in_lobe(series, propagator, maxima, lobes.front());
    if (!peak) {
        throw NoPeakFound("no interior maximum: first arrival is cut by the window; enlarge t_max");
    }
    peak->kind = PeakKind::first_maximum;
    return *peak;
}

PeakResult find_first_maximum(const FidelitySeries& series, const ChargeSectorHamiltonian& h,
                              const PeakOptions& options) {
    return find_first_maximum(series, Propagator(h), options);
}

PeakResult find_first_above_threshold(const FidelitySeries& series, const Propagator& propagator,
                                      double threshold, const PeakOptions& options) {
    check_series(series, propagator);
    detail::require(threshold > 0.5 && threshold < 1.0, "threshold: must lie in (0.5, 1)");
    const auto maxima = local_maxima(series.fidelity);
    for (const Lobe& lobe : arrival_lobes(series, options.arrival_floor)) {
        auto peak = best_in_lobe(series, propagator, maxima, lobe);
        if (peak && peak->f_peak >= threshold) {
            peak->kind = PeakKind::first_above_threshold;
            peak->threshold = threshold;
            return *peak;
        }
    }
    throw NoPeakFound("no maximum above threshold within t_max");
}

PeakResult find_first_above_threshold(const FidelitySeries& series,
                                      const ChargeSectorHamiltonian& h, double threshold,
                                      const PeakOptions& options) {
    return find_first_above_threshold(series, Propagator(h), threshold, options);
}

} // namespace jjchain
