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

#include <vector>

#include "jjchain/hamiltonian.hpp"
#include "jjchain/types.hpp"

namespace jjchain {

/// Exact closed-system evolution in the one-pair sector. The Hamiltonian is
/// diagonalised once; amplitudes at any time are sums over eigenmodes.
class Propagator {
public:
    explicit Propagator(const ChargeSectorHamiltonian& h);

    int length() const { return static_cast<int>(energies_.size()); }
    const Vector& energies() const { return energies_; }
    const Matrix& modes() const { return modes_; }

    /// <to| exp(-i H t) |from>, zero-based site indices.
    Complex amplitude(int from, int to, double t) const;

    /// <L| exp(-i H t) |1>.
    Complex transfer(double t) const { return amplitude(0, length() - 1, t); }

    /// exp(-i H t) |from> over all sites.
    CVector evolve_site(int from, double t) const;

private:
    Vector energies_;
    Matrix modes_;
};

Complex transfer_amplitude(const ChargeSectorHamiltonian& h, double t);

/// Bloch-sphere averaged transfer fidelity for amplitude f:
/// 1/2 + |f|^2/6 + Re(f)/3. Rejects |f| > 1 + 1e-8.
double fidelity_closed_form(Complex f);

/// Same average for a general output channel, given the site-L population
/// p reached from |1> and the coherence c = <vac|rho|L> reached from |vac><1|
/// (both per unit input weight): 1/2 + p/6 + Re(c)/3.
double fidelity_closed_form(double population, Complex coherence);

/// Quadrature of the sphere average of <psi| rho_L |psi>, with rho_L built
/// explicitly for every input state. Gauss-Legendre in cos(theta), uniform in phi.
double fidelity_bloch_numeric(Complex f, int n_theta, int n_phi);
double fidelity_bloch_numeric(double population, Complex coherence, int n_theta, int n_phi);

struct FidelitySeries {
    std::vector<double> times;
    std::vector<Complex> amplitude;
    std::vector<double> fidelity;

    std::size_t size() const { return times.size(); }
};

/// Uniform grid t = 0, dt, 2 dt, ... <= t_max using one eigendecomposition.
/// dt <= 0.1 is recommended for peak resolution.
FidelitySeries fidelity_series(const Propagator& propagator, double t_max, double dt);
FidelitySeries fidelity_series(const ChargeSectorHamiltonian& h, double t_max, double dt);

} // namespace jjchain
