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
#include <numeric>

#include "doctest.h"
#include "jjchain/hamiltonian.hpp"
#include "jjchain/transfer.hpp"
#include "support/oracles.hpp"

using namespace jjchain;

TEST_SUITE("hamiltonian") {

TEST_CASE("two decoupled islands") {
    const auto h = build_hamiltonian(ChainParams::uniform(2, 10.0, 0.0));
    Matrix expected(2, 2);
    expected << 5, -0.5, -0.5, 5;
    CHECK(h.h2 == expected);
    CHECK(h.vacuum_energy == 0.0);
}

TEST_CASE("single island with gate charge") {
    ChainParams p = ChainParams::uniform(1, 10.0, 0.0);
    p.qx = {0.1};
    const auto h = build_hamiltonian(p);
    REQUIRE(h.length() == 1);
    CHECK(h.h2(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("diagonal matches an independently inverted capacitance matrix") {
    ChainParams p = ChainParams::uniform(7, 10.0, 0.1);
    p.qx = {0.02, -0.01, 0.0, 0.03, 0.0, -0.04, 0.01};
    p.ej_bonds = {1.0, 0.9, 1.1, 1.0, 0.95, 1.05};
    const auto h = build_hamiltonian(p);
    const auto w = oracle::gauss_jordan_inverse(oracle::capacitance_matrix(7, 0.1));
    for (int j = 0; j < 7; ++j) {
        double coupling = 0.0;
        for (int i = 0; i < 7; ++i) {
            coupling += w[i][j] * p.qx[i];
        }
        CHECK(h.h2(j, j) == doctest::Approx(5.0 * (w[j][j] - 2.0 * coupling)).epsilon(1e-12));
    }
    for (int j = 0; j + 1 < 7; ++j) {
        CHECK(h.h2(j, j + 1) == -p.ej_bonds[j] / 2.0);
        CHECK(h.h2(j + 1, j) == -p.ej_bonds[j] / 2.0);
    }
    for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 7; ++j) {
            if (std::abs(i - j) > 1) {
                CHECK(h.h2(i, j) == 0.0);
            }
        }
    }
    CHECK((h.h2 - h.h2.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("charge block has dimension L") {
    for (int length : {1, 2, 5, 12}) {
        const auto h = build_hamiltonian(ChainParams::uniform(length, 10.0, 0.1));
        CHECK(h.h2.rows() == length);
        CHECK(h.h2.cols() == length);
    }
}

TEST_CASE("uniform chain commutes with reflection") {
    const int length = 8;
    const auto h = build_hamiltonian(ChainParams::uniform(length, 10.0, 0.3));
    const Matrix j = Matrix::Identity(length, length).rowwise().reverse();
    CHECK((h.h2 * j - j * h.h2).cwiseAbs().maxCoeff() <= 1e-13);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.h2);
    for (int k = 0; k < length; ++k) {
        const Vector v = es.eigenvectors().col(k);
        const double parity = v.dot(j * v);
        CHECK(std::abs(parity) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("uniform gate offset is a global phase") {
    const double delta = 0.07;
    ChainParams p = ChainParams::uniform(6, 10.0, 0.0);
    const auto h0 = build_hamiltonian(p);
    p.qx.assign(6, delta);
    const auto h1 = build_hamiltonian(p);
    for (int j = 0; j < 6; ++j) {
        CHECK(h1.h2(j, j) - h0.h2(j, j) == doctest::Approx(-10.0 * delta).epsilon(1e-12));
    }
    const Propagator a(h0), b(h1);
    for (double t : {0.5, 3.0, 11.0, 40.0}) {
        CHECK(std::abs(a.transfer(t)) == doctest::Approx(std::abs(b.transfer(t))).epsilon(1e-10));
    }
}

TEST_CASE("parameter validation names the field") {
    ChainParams p = ChainParams::uniform(3, 10.0, 0.1);
    p.ej_bonds = {1.0, -0.2};
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("ej_bonds"), InvalidArgument);
    p = ChainParams::uniform(3, 10.0, 0.1);
    p.qx = {0.0};
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("qx"), InvalidArgument);
    CHECK_THROWS_AS(build_hamiltonian(ChainParams::uniform(3, 10.0, 0.1), build_capacitance_model(4, 0.1)),
                    InvalidArgument);
    CHECK_THROWS_AS(build_hamiltonian(ChainParams::uniform(3, 10.0, 0.1), build_capacitance_model(3, 0.2)),
                    InvalidArgument);
}

TEST_CASE("zero-width disorder returns the base chain") {
    ChainParams base = ChainParams::uniform(5, 10.0, 0.1);
    base.qx = {0.01, 0.02, 0.0, 0.0, -0.01};
    for (std::uint64_t seed : {0ULL, 7ULL, 123456789ULL}) {
        const auto out = sample_disorder(DisorderSpec{0.0, 0.0, seed}, base, 3);
        CHECK(out.qx == base.qx);
        CHECK(out.ej_bonds == base.ej_bonds);
    }
}

TEST_CASE("disorder sampling is reproducible") {
    const auto base = ChainParams::uniform(7, 10.0, 0.0);
    const DisorderSpec spec{0.1, 0.025, 42};
    const auto a = sample_disorder(spec, base, 5);
    const auto b = sample_disorder(spec, base, 5);
    CHECK(a.ej_bonds == b.ej_bonds);
    CHECK(a.qx == b.qx);
    const auto c = sample_disorder(spec, base, 6);
    CHECK(a.ej_bonds != c.ej_bonds);
    CHECK(realization_seed(42, 5) == realization_seed(42, 5));
    CHECK(realization_seed(42, 5) != realization_seed(43, 5));
}

TEST_CASE("bond sampler statistics") {
    const auto base = ChainParams::uniform(2, 10.0, 0.0);
    const DisorderSpec spec{0.1, 0.0, 2024};
    const int n = 10000;
    std::vector<double> draws;
    for (int r = 0; r < n; ++r) {
        draws.push_back(sample_disorder(spec, base, r).ej_bonds[0]);
    }
    const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
    double var = 0.0;
    for (double x : draws) {
        var += (x - mean) * (x - mean);
    }
    const double sd = std::sqrt(var / (n - 1));
    CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sd == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("charge sampler statistics") {
    const auto base = ChainParams::uniform(1, 10.0, 0.0);
    const DisorderSpec spec{0.0, 0.025, 99};
    const int n = 10000;
    double sum = 0.0, sq = 0.0;
    for (int r = 0; r < n; ++r) {
        const double q = sample_disorder(spec, base, r).qx[0];
        sum += q;
        sq += q * q;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sq - n * mean * mean) / (n - 1));
    CHECK(std::abs(mean) < 3.0 * 0.025 / std::sqrt(n) + 1e-12);
    CHECK(sd == doctest::Approx(0.025).epsilon(0.05));
}

TEST_CASE("broad bond disorder never yields non-positive couplings") {
    const auto base = ChainParams::uniform(12, 10.0, 0.0);
    const DisorderSpec spec{0.6, 0.0, 5};
    for (int r = 0; r < 500; ++r) {
        for (double e : sample_disorder(spec, base, r).ej_bonds) {
            CHECK(e > 0.0);
        }
    }
}

TEST_CASE("negative disorder widths are rejected") {
    CHECK_THROWS_AS(DisorderSpec({-0.1, 0.0, 0}).validate(), InvalidArgument);
    CHECK_THROWS_AS(DisorderSpec({0.0, -0.1, 0}).validate(), InvalidArgument);
}

}
