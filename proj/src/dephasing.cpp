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

#include "jjchain/dephasing.hpp"

#include <cmath>

#include "jjchain/transfer.hpp"

namespace jjchain {

int DensityMatrix::qp_index() const {
    detail::require(basis == Basis::readout, "qp_index: chain basis has no quasiparticle state");
    return 1;
}

DensityMatrix input_state(int length, double theta, double phi, DensityMatrix::Basis basis) {
    detail::require(length >= 1, "length: L >= 1 required");
    DensityMatrix out;
    out.basis = basis;
    const int dim = length + (basis == DensityMatrix::Basis::chain ? 1 : 2);
    CVector psi = CVector::Zero(dim);
    psi(DensityMatrix::vacuum_index()) = std::cos(0.5 * theta);
    psi(out.site_index(1)) = std::polar(std::sin(0.5 * theta), phi);
    out.rho = psi * psi.adjoint();
    return out;
}

DephasingRates build_dephasing_rates(double gamma, const CapacitanceModel& model) {
    detail::require(std::isfinite(gamma) && gamma >= 0.0, "gamma: must be finite and >= 0");
    DephasingRates rates;
    rates.gamma = gamma;
    rates.D = 0.5 * gamma * (model.inverse * model.inverse);
    rates.D = 0.5 * (rates.D + rates.D.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> solver(rates.D, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-12) {
        throw NumericalError("dephasing rate matrix is not positive semidefinite");
    }
    return rates;
}

namespace {

CMatrix full_hamiltonian(const ChargeSectorHamiltonian& h) {
    const int n = h.length();
    CMatrix full = CMatrix::Zero(n + 1, n + 1);
    full(0, 0) = h.vacuum_energy;
    full.bottomRightCorner(n, n) = h.h2.cast<Complex>();
    return full;
}

} // namespace

CMatrix dephasing_rhs(const DensityMatrix& rho, const ChargeSectorHamiltonian& h,
                      const DephasingRates& rates) {
    const int n = h.length();
    detail::require(rho.basis == DensityMatrix::Basis::chain && rho.dim() == n + 1,
                    "dephasing_rhs: density matrix must live on {vac, 1..L}");
    detail::require(rates.D.rows() == n, "dephasing_rhs: rate matrix size does not match L");

    const CMatrix hfull = full_hamiltonian(h);
    const Complex minus_i(0.0, -1.0);
    CMatrix out = minus_i * (hfull * rho.rho - rho.rho * hfull);

    // The dissipator is diagonal in the site basis: element (a, b) decays at
    // D_aa + D_bb - 2 D_ab, with vacuum terms absent.
    const Matrix& D = rates.D;
    for (int b = 1; b <= n; ++b) {
        out(0, b) -= D(b - 1, b - 1) * rho.rho(0, b);
        out(b, 0) -= D(b - 1, b - 1) * rho.rho(b, 0);
        for (int a = 1; a <= n; ++a) {
            const double rate = D(a - 1, a - 1) + D(b - 1, b - 1) - 2.0 * D(a - 1, b - 1);
            out(a, b) -= rate * rho.rho(a, b);
        }
    }
    return out;
}

CMatrix dephasing_generator(const ChargeSectorHamiltonian& h, const DephasingRates& rates) {
    const int dim = h.length() + 1;
    return superoperator(
        [&](const CMatrix& m) {
            return dephasing_rhs(DensityMatrix{DensityMatrix::Basis::chain, m}, h, rates);
        },
        dim);
}

double channel_fidelity(const DensityMatrix& rho, const DensityMatrix& rho0, FidelityEvaluation mode) {
    const int last = rho.site_index(rho.length());
    const int first = rho0.site_index(1);
    const double p0 = rho0.rho(first, first).real();
    const Complex c0 = rho0.rho(DensityMatrix::vacuum_index(), first);
    detail::require(p0 > 0.0 && std::abs(c0) > 0.0,
                    "channel_fidelity: input needs weight and coherence on |1>");

    const double population = rho.rho(last, last).real() / p0;
    const Complex coherence = rho.rho(DensityMatrix::vacuum_index(), last) / c0;
    if (mode == FidelityEvaluation::bloch_numeric) {
        return fidelity_bloch_numeric(population, coherence, 64, 64);
    }
    return fidelity_closed_form(population, coherence);
}

namespace {

void require_input_form(const DensityMatrix& rho0) {
    const int first = rho0.site_index(1);
    for (int a = 0; a < rho0.dim(); ++a) {
        for (int b = 0; b < rho0.dim(); ++b) {
            const bool in_span = (a == 0 || a == first) && (b == 0 || b == first);
            detail::require(in_span || std::abs(rho0.rho(a, b)) == 0.0,
                            "evolve_dephasing: rho0 must be supported on span{vac, |1>}");
        }
    }
    const auto d = diagnose(rho0.rho);
    detail::require(d.trace_error <= 1e-10 && d.hermiticity_error <= 1e-12 && d.min_eigenvalue >= -1e-9,
                    "evolve_dephasing: rho0 is not a valid density matrix");
}

struct Integration {
    std::vector<double> times;
    std::vector<CVector> states;
};

Integration integrate(const CVector& x0, const CMatrix& generator, double t_max, double dt,
                      double sample_dt) {
    const long per_sample = std::max(1L, static_cast<long>(std::ceil(sample_dt / dt - 1e-9)));
    const double step = sample_dt / static_cast<double>(per_sample);
    const long samples = static_cast<long>(std::floor(t_max / sample_dt + 1e-9));
    const Rk4Propagator rk4(generator, step);

    Integration out;
    out.times.reserve(samples + 1);
    out.states.reserve(samples + 1);
    CVector x = x0;
    out.times.push_back(0.0);
    out.states.push_back(x);
    for (long s = 1; s <= samples; ++s) {
        x = rk4.advance(x, per_sample);
        out.times.push_back(static_cast<double>(s) * sample_dt);
        out.states.push_back(x);
    }
    return out;
}

} // namespace

DephasingRun evolve_dephasing(const DensityMatrix& rho0, const ChargeSectorHamiltonian& h,
                              const DephasingRates& rates, const DephasingOptions& options) {
    detail::require(rho0.basis == DensityMatrix::Basis::chain && rho0.dim() == h.length() + 1,
                    "evolve_dephasing: rho0 must live on {vac, 1..L}");
    detail::require(options.t_max > 0.0 && options.dt > 0.0 && options.sample_dt >= options.dt,
                    "evolve_dephasing: need t_max > 0 and 0 < dt <= sample_dt");
    detail::require(options.max_refinements >= 0, "max_refinements: must be >= 0");
    require_input_form(rho0);

    const int dim = rho0.dim();
    const CMatrix generator = dephasing_generator(h, rates);
    const int last = rho0.site_index(h.length());
    const int first = rho0.site_index(1);
    double dt = options.dt;
    for (int attempt = 0;; ++attempt) {
        try {
            const Integration run = integrate(vectorize(rho0.rho), generator, options.t_max, dt,
                                              options.sample_dt);
            DephasingRun out;
            out.times = run.times;
            out.accepted_dt = dt;
            for (std::size_t k = 0; k < run.times.size(); ++k) {
                DensityMatrix state{DensityMatrix::Basis::chain, unvectorize(run.states[k], dim)};
                const auto d = diagnose(state.rho);
                check_state(d, run.times[k], options.tolerances);
                out.diagnostics.push_back(d);
                out.fidelity.push_back(channel_fidelity(state, rho0, options.fidelity));
                out.rho_LL.push_back(state.rho(last, last).real());
                out.rho_11.push_back(state.rho(first, first).real());
                if (options.keep_states) {
                    out.states.push_back(std::move(state));
                }
            }
            if (options.verify_step) {
                const Integration half = integrate(vectorize(rho0.rho), generator, options.t_max, 0.5 * dt,
                                                   options.sample_dt);
                for (std::size_t k = 0; k < half.states.size(); ++k) {
                    out.step_halving_error = std::max(
                        out.step_halving_error, (half.states[k] - run.states[k]).cwiseAbs().maxCoeff());
                }
            }
            return out;
        } catch (const StateCheckFailed&) {
            if (attempt >= options.max_refinements) {
                throw;
            }
            dt *= 0.5;
        }
    }
}

double stationary_fidelity(int length) {
    detail::require(length >= 1, "length: L >= 1 required");
    return 0.5 + 1.0 / (6.0 * length);
}

} // namespace jjchain
