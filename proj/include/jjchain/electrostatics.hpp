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

#include "jjchain/types.hpp"

namespace jjchain {

/// Capacitance matrix of an open chain of islands, in units of the ground
/// capacitance C0. Each island couples to its neighbours through a junction
/// capacitance C (ratio c_ratio = C/C0) and to ground through C0.
struct CapacitanceModel {
    int length = 0;
    double c_ratio = 0.0;
    Matrix matrix;  ///< M, tridiagonal, symmetric positive definite
    Matrix inverse; ///< W = M^-1, the screened interaction
};

/// Builds M and its inverse. Throws InvalidArgument for length < 1 or a
/// negative / non-finite c_ratio.
CapacitanceModel build_capacitance_model(int length, double c_ratio);

/// Screening length in lattice units, from a linear fit of log W[mid][mid+k]
/// against k over interior sites. Requires c_ratio > 0 and length >= 5.
double interaction_range(const CapacitanceModel& model);

} // namespace jjchain
