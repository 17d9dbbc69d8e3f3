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

#include "jjchain/liouville.hpp"

#include <algorithm>
#include <sstream>

namespace jjchain {

CVector vectorize(const CMatrix& rho) {
    return Eigen::Map<const CVector>(rho.data(), rho.size());
}

CMatrix unvectorize(const CVector& v, int dim) {
    detail::require(v.size() == static_cast<Eigen::Index>(dim) * dim, "unvectorize: size mismatch");
    return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

CMatrix superoperator(const std::function<CMatrix(const CMatrix&)>& map, int dim) {
    const int n = dim * dim;
    CMatrix out(n, n);
    for (int col = 0; col < dim; ++col) {
        for (int row = 0; row < dim; ++row) {
            CMatrix unit = CMatrix::Zero(dim, dim);
            unit(row, col) = 1.0;
            out.col(col * dim + row) = vectorize(map(unit));
        }
    }
    return out;
}

Rk4Propagator::Rk4Propagator(const CMatrix& generator, double step) : step_(step) {
    detail::require(generator.rows() == generator.cols(), "Rk4Propagator: generator must be square");
    detail::require(step > 0.0, "Rk4Propagator: step > 0 required");
    const CMatrix hg = step * generator;
    const CMatrix id = CMatrix::Identity(generator.rows(), generator.cols());
    // I + hG (I + hG/2 (I + hG/3 (I + hG/4)))
    CMatrix acc = id + hg / 4.0;
    acc = id + (hg / 3.0) * acc;
    acc = id + (hg / 2.0) * acc;
    step_map_ = id + hg * acc;
}

CVector Rk4Propagator::advance(const CVector& x, long steps) const {
    CVector state = x;
    CVector next(x.size());
    for (long s = 0; s < steps; ++s) {
        next.noalias() = step_map_ * state;
        state.swap(next);
    }
    return state;
}

StateDiagnostics diagnose(const CMatrix& rho) {
    StateDiagnostics d;
    d.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
    d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    const CMatrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = solver.eigenvalues().minCoeff();
    return d;
}

void check_state(const StateDiagnostics& d, double t, const StateTolerances& tol) {
    if (d.trace_error > tol.trace || d.hermiticity_error > tol.hermiticity ||
        d.min_eigenvalue < tol.min_eigenvalue) {
        std::ostringstream msg;
        msg << "density matrix left the physical set at t=" << t << " (trace error " << d.trace_error
            << ", hermiticity error " << d.hermiticity_error << ", min eigenvalue " << d.min_eigenvalue
            << "); reduce the integration step";
        throw StateCheckFailed(msg.str());
    }
}

} // namespace jjchain
