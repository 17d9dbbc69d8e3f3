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

#include "jjchain/hamiltonian.hpp"

#include <cmath>
#include <random>
#include <string>

#include <boost/random/normal_distribution.hpp>

namespace jjchain {

ChainParams ChainParams::uniform(int length, double u0, double c_ratio) {
    detail::require(length >= 1, "length: L >= 1 required");
    ChainParams p;
    p.length = length;
    p.u0 = u0;
    p.c_ratio = c_ratio;
    p.qx.assign(length, 0.0);
    p.ej_bonds.assign(length - 1, 1.0);
    return p;
}

void ChainParams::validate() const {
    detail::require(length >= 1, "length: L >= 1 required");
    detail::require(std::isfinite(u0) && u0 >= 0.0, "u0: must be finite and >= 0");
    detail::require(std::isfinite(c_ratio) && c_ratio >= 0.0,
                    "c_ratio: must be finite and >= 0");
    detail::require(static_cast<int>(qx.size()) == length,
                    "qx: expected " + std::to_string(length) + " entries, got " +
                        std::to_string(qx.size()));
    detail::require(static_cast<int>(ej_bonds.size()) == length - 1,
                    "ej_bonds: expected " + std::to_string(length - 1) + " entries, got " +
                        std::to_string(ej_bonds.size()));
    for (double q : qx) {
        detail::require(std::isfinite(q), "qx: entries must be finite");
    }
    for (double ej : ej_bonds) {
        detail::require(std::isfinite(ej) && ej > 0.0, "ej_bonds: entries must be > 0");
    }
}

ChargeSectorHamiltonian build_hamiltonian(const ChainParams& params, const CapacitanceModel& model) {
    params.validate();
    detail::require(model.length == params.length,
                    "build_hamiltonian: capacitance model length does not match L");
    detail::require(model.c_ratio == params.c_ratio,
                    "build_hamiltonian: capacitance model c_ratio does not match params");

    const int n = params.length;
    const Eigen::Map<const Vector> qx(params.qx.data(), n);
    const Matrix& w = model.inverse;
    const Vector induced = w.transpose() * qx; // sum_i W[i][j] q_i

    ChargeSectorHamiltonian h;
    h.h2 = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        h.h2(j, j) = 0.5 * params.u0 * (w(j, j) - 2.0 * induced(j));
    }
    for (int j = 0; j + 1 < n; ++j) {
        h.h2(j, j + 1) = -0.5 * params.ej_bonds[j];
        h.h2(j + 1, j) = -0.5 * params.ej_bonds[j];
    }
    return h;
}

ChargeSectorHamiltonian build_hamiltonian(const ChainParams& params) {
    params.validate();
    return build_hamiltonian(params, build_capacitance_model(params.length, params.c_ratio));
}

void DisorderSpec::validate() const {
    detail::require(std::isfinite(bond_sigma) && bond_sigma >= 0.0,
                    "bond_sigma: must be finite and >= 0");
    detail::require(std::isfinite(charge_sigma) && charge_sigma >= 0.0,
                    "charge_sigma: must be finite and >= 0");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) ^ index);
}

ChainParams sample_disorder(const DisorderSpec& spec, const ChainParams& base,
                            std::uint64_t realization_index) {
    spec.validate();
    base.validate();

    ChainParams out = base;
    if (spec.bond_sigma == 0.0 && spec.charge_sigma == 0.0) {
        return out;
    }

    std::mt19937_64 engine(realization_seed(spec.seed, realization_index));
    boost::random::normal_distribution<double> normal(0.0, 1.0);

    // Bonds first, then charges; both streams always drawn so the charge
    // sample does not depend on whether bond disorder is switched on.
    for (std::size_t j = 0; j < out.ej_bonds.size(); ++j) {
        double draw;
        do {
            draw = 1.0 + spec.bond_sigma * normal(engine);
        } while (draw <= 0.0);
        out.ej_bonds[j] = base.ej_bonds[j] * draw;
    }
    for (std::size_t i = 0; i < out.qx.size(); ++i) {
        out.qx[i] = base.qx[i] + spec.charge_sigma * normal(engine);
    }
    return out;
}

} // namespace jjchain
