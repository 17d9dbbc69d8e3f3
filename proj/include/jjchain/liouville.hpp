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

#include <functional>
#include <vector>

#include "jjchain/types.hpp"

namespace jjchain {

/// Column-stacked vec(rho).
CVector vectorize(const CMatrix& rho);
CMatrix unvectorize(const CVector& v, int dim);

/// Matrix of a linear map on dim x dim matrices, acting on vec(rho).
CMatrix superoperator(const std::function<CMatrix(const CMatrix&)>& map, int dim);

/// Classical fourth-order Runge-Kutta for x' = G x with constant G. For a
/// linear autonomous system one RK4 step is the degree-4 Taylor polynomial of
/// exp(hG), which is precomputed once.
class Rk4Propagator {
public:
    Rk4Propagator(const CMatrix& generator, double step);

    double step() const { return step_; }
    CVector advance(const CVector& x, long steps = 1) const;

private:
    double step_;
    CMatrix step_map_;
};

struct StateDiagnostics {
    double trace_error = 0.0;       ///< |Tr rho - 1|
    double hermiticity_error = 0.0; ///< max |rho - rho^dagger|
    double min_eigenvalue = 0.0;
};

StateDiagnostics diagnose(const CMatrix& rho);

/// Tolerances a stored density-matrix snapshot must satisfy.
struct StateTolerances {
    double trace = 1e-10;
    double hermiticity = 1e-12;
    double min_eigenvalue = -1e-9;
};

/// A snapshot left the physical set; usually cured by a smaller step.
class StateCheckFailed : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Throws StateCheckFailed when a snapshot violates the tolerances.
void check_state(const StateDiagnostics& d, double t, const StateTolerances& tol = {});

} // namespace jjchain
