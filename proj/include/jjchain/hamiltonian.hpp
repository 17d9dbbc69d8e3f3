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
#include <vector>

#include "jjchain/electrostatics.hpp"
#include "jjchain/types.hpp"

namespace jjchain {

/// Model parameters of the chain. Energies are in units of the nominal
/// Josephson energy E_J, times in 1/E_J, gate charges in units of 2e.
struct ChainParams {
    int length = 1;
    double u0 = 10.0;      ///< charging ratio (2e)^2 / (E_J C0)
    double c_ratio = 0.0;  ///< C / C0
    std::vector<double> qx;       ///< gate charge per island (length L)
    std::vector<double> ej_bonds; ///< Josephson energy per bond (length L-1)

    /// Clean chain: qx = 0, all bonds at the nominal E_J.
    static ChainParams uniform(int length, double u0, double c_ratio);

    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

/// Conserved-charge block with one excess Cooper pair, in the site basis
/// |1>..|L>. The zero-charge state |vac> has energy exactly 0.
struct ChargeSectorHamiltonian {
    Matrix h2;
    double vacuum_energy = 0.0;

    int length() const { return static_cast<int>(h2.rows()); }
};

ChargeSectorHamiltonian build_hamiltonian(const ChainParams& params, const CapacitanceModel& model);

/// Builds the capacitance model internally.
ChargeSectorHamiltonian build_hamiltonian(const ChainParams& params);

/// Static disorder: Gaussian bond energies around E_J (relative width) and
/// Gaussian gate-charge offsets (absolute width, units of 2e).
struct DisorderSpec {
    double bond_sigma = 0.0;
    double charge_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Stable seed mixing (splitmix64 finalizer over seed and index).
std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index);

/// One disorder realization. Bond draws giving ej <= 0 are redrawn; output is
/// a pure function of (spec, base, realization_index).
ChainParams sample_disorder(const DisorderSpec& spec, const ChainParams& base,
                            std::uint64_t realization_index);

} // namespace jjchain
