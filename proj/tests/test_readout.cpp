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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "jjchain/readout.hpp"
#include "jjchain/transfer.hpp"
#include "support/oracles.hpp"

using namespace jjchain;
using std::numbers::pi;

namespace {

ReadoutParams short_tail(double gamma, double t_star) {
    ReadoutParams rp;
    rp.gamma_qp = gamma;
    rp.t_star = t_star;
    rp.t_tail = 20.0 / gamma;
    return rp;
}

} // namespace

TEST_SUITE("readout") {

TEST_CASE("generator without tunnelling is the closed chain") {
    const auto h = build_hamiltonian(ChainParams::uniform(5, 10.0, 0.1));
    const auto g = build_readout_generator(h, 0.0, true);
    const Rk4Propagator rk4(g.matrix(), 0.001);
    const double theta = 2.0, phi = 0.3;
    CVector x = vectorize(input_state(5, theta, phi, DensityMatrix::Basis::readout).rho);
    const Propagator prop(h);
    for (int block = 1; block <= 4; ++block) {
        x = rk4.advance(x, 5000);
        const double t = 5.0 * block;
        const CMatrix rho = unvectorize(x, 7);
        CVector psi = CVector::Zero(7);
        psi(0) = std::cos(theta / 2.0);
        psi.tail(5) = std::polar(std::sin(theta / 2.0), phi) * prop.evolve_site(0, t);
        CHECK((rho - psi * psi.adjoint()).cwiseAbs().maxCoeff() <= 1e-8);
        const double p = rho(6, 6).real() / std::pow(std::sin(theta / 2.0), 2);
        const Complex c = rho(0, 6) / (std::cos(theta / 2.0) * std::polar(std::sin(theta / 2.0), -phi));
        CHECK(fidelity_closed_form(p, c) == doctest::Approx(fidelity_closed_form(prop.transfer(t))).epsilon(1e-8));
    }
}

TEST_CASE("generator matches its action") {
    const auto h = build_hamiltonian(ChainParams::uniform(4, 10.0, 0.2));
    for (bool connected : {true, false}) {
        const auto g = build_readout_generator(h, 0.07, connected);
        std::mt19937_64 rng(3);
        std::normal_distribution<double> n;
        CMatrix a(6, 6);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                a(i, j) = Complex(n(rng), n(rng));
            }
        }
        const CMatrix rho = a * a.adjoint();
        CHECK((unvectorize(g.matrix() * vectorize(rho), 6) - g.apply(rho)).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("site-basis cascade matches the eigenbasis kernel") {
    const double gamma = 0.05;
    const auto h = build_hamiltonian(ChainParams::uniform(5, 10.0, 0.1));
    ReadoutParams rp = short_tail(gamma, 200.0);
    const auto rho0 = input_state(5, 2.2, 0.9, DensityMatrix::Basis::readout);
    const auto run = evolve_readout(rho0, h, rp, true);
    const double dt = run.accepted_dt;

    const oracle::ReadoutKernel kernel(h.h2, gamma);
    Eigen::MatrixXcd eig = kernel.to_eigen(rho0.rho);
    double t = 0.0;
    for (std::size_t k = 1; k < run.times.size() && run.times[k] <= 100.0 + 1e-9; ++k) {
        const double span = run.times[k] - t;
        const long steps = std::lround(span / dt);
        for (long s = 0; s < steps; ++s) {
            eig = kernel.step(eig, span / static_cast<double>(steps));
        }
        t = run.times[k];
        CHECK((kernel.to_site(eig) - run.states[k].rho).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("disconnected last island empties exponentially") {
    const double gamma = 0.05;
    const auto h = build_hamiltonian(ChainParams::uniform(4, 10.0, 0.1));
    DensityMatrix rho0{DensityMatrix::Basis::readout, CMatrix::Zero(6, 6)};
    rho0.rho(5, 5) = 1.0;
    const auto run = evolve_readout(rho0, h, short_tail(gamma, 0.0));
    for (std::size_t k = 0; k < run.times.size(); k += 50) {
        CHECK(run.rho_LL[k] == doctest::Approx(std::exp(-gamma * run.times[k])).epsilon(1e-9));
    }
    CHECK(run.integrated_current == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("vacuum input produces no current") {
    const auto run = evolve_readout(0.0, 0.0, ChainParams::uniform(5, 10.0, 0.1), short_tail(0.05, 10.0));
    for (double i : run.current) {
        CHECK(std::abs(i) <= 1e-15);
    }
    CHECK(std::abs(run.integrated_current) <= 1e-15);
}

TEST_CASE("post-disconnect charge equals the closed form") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto params = ChainParams::uniform(6, 10.0, 0.1);
    for (int k = 0; k < 5; ++k) {
        ReadoutParams rp;
        rp.gamma_qp = 0.05;
        rp.t_star = 20.0 * u(rng);
        const auto run = evolve_readout(pi * u(rng), 2.0 * pi * u(rng), params, rp);
        CHECK(std::abs(run.post_disconnect_charge - run.approx_integrated_current) <= 1e-6);
        CHECK(run.pre_disconnect_charge < rp.gamma_qp * rp.t_star);
        CHECK(run.approx_integrated_current ==
              doctest::Approx(2.0 * run.rho_LL_at_disconnect + run.p_qp_at_disconnect));
    }
}

TEST_CASE("state bookkeeping along a run") {
    const auto run = evolve_readout(2.5, 1.0, ChainParams::uniform(5, 10.0, 0.1), short_tail(0.05, 15.0), true);
    for (std::size_t k = 0; k < run.times.size(); ++k) {
        const CMatrix& rho = run.states[k].rho;
        const int qp = run.states[k].qp_index();
        for (int j = 0; j < rho.rows(); ++j) {
            if (j != qp) {
                CHECK(std::abs(rho(qp, j)) <= 1e-12);
            }
        }
        CHECK(std::abs(rho.trace().real() - 1.0) <= 1e-10);
        CHECK(run.current[k] >= 0.0);
        CHECK(run.diagnostics[k].min_eigenvalue >= -1e-9);
    }
    CHECK(run.integrated_current <= 2.0);
}

TEST_CASE("each Cooper pair leaves as two quasiparticles") {
    // Connected long enough for the whole chain to drain through the last island.
    const auto run = evolve_readout(pi, 0.0, ChainParams::uniform(4, 10.0, 0.1), short_tail(0.2, 1000.0));
    CHECK(run.integrated_current == doctest::Approx(2.0).epsilon(1e-6));
    // Disconnected from the start, only the weight already on the last island leaves.
    const double theta = 1.1;
    DensityMatrix rho0{DensityMatrix::Basis::readout, CMatrix::Zero(6, 6)};
    rho0.rho(0, 0) = std::pow(std::cos(theta / 2.0), 2);
    rho0.rho(5, 5) = std::pow(std::sin(theta / 2.0), 2);
    rho0.rho(0, 5) = rho0.rho(5, 0) = std::cos(theta / 2.0) * std::sin(theta / 2.0);
    const auto cut = evolve_readout(rho0, build_hamiltonian(ChainParams::uniform(4, 10.0, 0.1)), short_tail(0.05, 0.0));
    CHECK(cut.integrated_current == doctest::Approx(2.0 * rho0.rho(5, 5).real()).epsilon(1e-6));
}

TEST_CASE("current ignores the input phase") {
    const auto params = ChainParams::uniform(5, 10.0, 0.1);
    const std::vector<double> grid{0.0, 3.0, 6.0, 9.0, 12.0};
    const auto a = current_vs_tstar_sweep(params, 0.05, grid, 1.3, 0.0);
    const auto b = current_vs_tstar_sweep(params, 0.05, grid, 1.3, 2.1);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(std::abs(a[k].integrated_current - b[k].integrated_current) <= 1e-10);
    }
}

TEST_CASE("sweep endpoints and weak-tunnelling limit") {
    const auto params = ChainParams::uniform(5, 10.0, 0.1);
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) {
        grid.push_back(0.5 * k);
    }
    const auto rows = current_vs_tstar_sweep(params, 1e-6, grid, pi, 0.0);
    CHECK(std::abs(rows[0].integrated_current) <= 1e-12);
    const Propagator prop(build_hamiltonian(params));
    for (const auto& r : rows) {
        CHECK(r.integrated_current == doctest::Approx(2.0 * std::norm(prop.transfer(r.t_star))).epsilon(1e-4));
        CHECK(r.fidelity_isolated == fidelity_closed_form(prop.transfer(r.t_star)));
    }
}

TEST_CASE("sweep agrees with individual protocol runs") {
    const auto params = ChainParams::uniform(4, 10.0, 0.1);
    const std::vector<double> grid{0.0, 2.5, 7.0};
    const auto rows = current_vs_tstar_sweep(params, 0.05, grid, pi, 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        ReadoutParams rp;
        rp.t_star = grid[k];
        const auto run = evolve_readout(pi, 0.0, params, rp);
        CHECK(rows[k].integrated_current == doctest::Approx(run.integrated_current).epsilon(1e-7));
        CHECK(rows[k].rho_LL == doctest::Approx(run.rho_LL_at_disconnect).epsilon(1e-7));
    }
}

TEST_CASE("cascade decay fit recovers the rate") {
    std::vector<double> t, y;
    for (int k = 0; k <= 800; ++k) {
        const double s = 0.5 * k;
        t.push_back(10.0 + s);
        y.push_back((0.3 + 0.02 * s) * std::exp(-s / 20.0));
    }
    CHECK(fit_cascade_decay(t, y) == doctest::Approx(20.0).epsilon(1e-6));
    CHECK_THROWS_AS(fit_cascade_decay(std::vector<double>{0, 1, 2, 3}, std::vector<double>{0, 0, 0, 0}),
                    NumericalError);
}

TEST_CASE("parameter validation") {
    ReadoutParams rp;
    rp.gamma_qp = 0.0;
    CHECK_THROWS_AS(rp.validate(), InvalidArgument);
    rp = ReadoutParams{};
    rp.t_tail = 10.0;
    CHECK_THROWS_WITH_AS(rp.validate(), doctest::Contains("t_tail"), InvalidArgument);
    rp = ReadoutParams{};
    rp.t_star = 1.0;
    CHECK(rp.disconnect_is_early());
    rp.t_star = 40.0;
    CHECK_FALSE(rp.disconnect_is_early());
    CHECK_THROWS_AS(current_vs_tstar_sweep(ChainParams::uniform(3, 10.0, 0.1), 0.05, std::vector<double>{1.0, 0.5},
                                           pi, 0.0),
                    InvalidArgument);
}

}
