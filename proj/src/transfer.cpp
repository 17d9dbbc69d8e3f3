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

#include "jjchain/transfer.hpp"

#include <cmath>
#include <numbers>

namespace jjchain {

Propagator::Propagator(const ChargeSectorHamiltonian& h) {
    detail::require(h.length() >= 1, "Propagator: empty Hamiltonian");
    detail::require(h.h2.allFinite(), "Propagator: Hamiltonian has non-finite entries");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.h2);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Propagator: eigendecomposition failed");
    }
    energies_ = solver.eigenvalues();
    modes_ = solver.eigenvectors();
}

Complex Propagator::amplitude(int from, int to, double t) const {
    Complex sum{0.0, 0.0};
    for (int k = 0; k < length(); ++k) {
        sum += modes_(to, k) * modes_(from, k) * std::polar(1.0, -energies_(k) * t);
    }
    return sum;
}

CVector Propagator::evolve_site(int from, double t) const {
    CVector phases(length());
    for (int k = 0; k < length(); ++k) {
        phases(k) = modes_(from, k) * std::polar(1.0, -energies_(k) * t);
    }
    return modes_.cast<Complex>() * phases;
}

Complex transfer_amplitude(const ChargeSectorHamiltonian& h, double t) {
    detail::require(t >= 0.0, "transfer_amplitude: t >= 0 required");
    return Propagator(h).transfer(t);
}

double fidelity_closed_form(Complex f) {
    detail::require(std::abs(f) <= 1.0 + 1e-8, "fidelity_closed_form: |f| > 1 is non-physical");
    return fidelity_closed_form(std::norm(f), std::conj(f));
}

double fidelity_closed_form(double population, Complex coherence) {
    return 0.5 + population / 6.0 + coherence.real() / 3.0;
}

namespace {

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

} // namespace

double fidelity_bloch_numeric(Complex f, int n_theta, int n_phi) {
    return fidelity_bloch_numeric(std::norm(f), std::conj(f), n_theta, n_phi);
}

double fidelity_bloch_numeric(double population, Complex coherence, int n_theta, int n_phi) {
    if (n_theta < 32 || n_phi < 32) {
        throw InvalidArgument("fidelity_bloch_numeric: insufficient quadrature resolution (need >= 32)");
    }
    std::vector<double> nodes, weights;
    gauss_legendre(n_theta, nodes, weights);

    double total = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        const double u = nodes[i]; // cos(theta)
        const double a = std::sqrt(0.5 * (1.0 + u));
        const double s = std::sqrt(0.5 * (1.0 - u));
        double ring = 0.0;
        for (int m = 0; m < n_phi; ++m) {
            const double phi = 2.0 * std::numbers::pi * m / n_phi;
            const Complex b = std::polar(s, phi);

            // Reduced state of the last island in the {0, 2} charge basis.
            Eigen::Matrix2cd rho;
            rho(1, 1) = std::norm(b) * population;
            rho(0, 0) = 1.0 - rho(1, 1);
            rho(0, 1) = a * std::conj(b) * coherence;
            rho(1, 0) = std::conj(rho(0, 1));

            const Eigen::Vector2cd psi(a, b);
            ring += (psi.adjoint() * rho * psi)(0, 0).real();
        }
        total += weights[i] * ring / n_phi;
    }
    // (1 / 4pi) * integral over dphi d(cos theta)
    return 0.5 * total;
}

FidelitySeries fidelity_series(const Propagator& propagator, double t_max, double dt) {
    detail::require(t_max > 0.0 && std::isfinite(t_max), "fidelity_series: t_max > 0 required");
    detail::require(dt > 0.0 && std::isfinite(dt), "fidelity_series: dt > 0 required");

    const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
    FidelitySeries series;
    series.times.resize(n);
    series.amplitude.resize(n);
    series.fidelity.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        const Complex f = propagator.transfer(t);
        series.times[k] = t;
        series.amplitude[k] = f;
        series.fidelity[k] = fidelity_closed_form(f);
    }
    return series;
}

FidelitySeries fidelity_series(const ChargeSectorHamiltonian& h, double t_max, double dt) {
    return fidelity_series(Propagator(h), t_max, dt);
}

} // namespace jjchain
