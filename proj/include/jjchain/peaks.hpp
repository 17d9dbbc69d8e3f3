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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "jjchain/transfer.hpp"

namespace jjchain {

/// Strict interior local maxima. A plateau counts once, at its earliest
/// point, when both sides drop.
std::vector<std::size_t> local_maxima(std::span<const double> values);
std::vector<std::size_t> local_minima(std::span<const double> values);

/// Local maxima whose topographic prominence is at least min_prominence.
std::vector<std::size_t> prominent_peaks(std::span<const double> values, double min_prominence);

enum class PeakKind { first_maximum, first_above_threshold };

struct PeakResult {
    double t_peak = 0.0;
    double f_peak = 0.0;
    Complex amplitude{};
    PeakKind kind = PeakKind::first_maximum;
    std::optional<double> threshold;
};

struct PeakOptions {
    /// Minimum |f| for an arrival lobe to count; filters round-off ripples
    /// before the excitation reaches the last island.
    double arrival_floor = 0.05;
};

/// Thrown when the searched window holds no qualifying maximum.
class NoPeakFound : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Highest fidelity maximum inside the first arrival lobe of |f|, refined on
/// the exact amplitude. Lobes are delimited by minima of |f|; the fast
/// fidelity ripple from the charging-energy phase stays inside a lobe.
PeakResult find_first_maximum(const FidelitySeries& series, const Propagator& propagator,
                              const PeakOptions& options = {});
PeakResult find_first_maximum(const FidelitySeries& series, const ChargeSectorHamiltonian& h,
                              const PeakOptions& options = {});

/// First lobe whose best refined fidelity reaches threshold, threshold in (0.5, 1).
PeakResult find_first_above_threshold(const FidelitySeries& series, const Propagator& propagator,
                                      double threshold, const PeakOptions& options = {});
PeakResult find_first_above_threshold(const FidelitySeries& series,
                                      const ChargeSectorHamiltonian& h, double threshold,
                                      const PeakOptions& options = {});

} // namespace jjchain
