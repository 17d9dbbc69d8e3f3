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

#include "jjchain/electrostatics.hpp"

#include <algorithm>
#include <cmath>

namespace jjchain {

CapacitanceModel build_capacitance_model(int length, double c_ratio) {
    detail::require(length >= 1, "length: L >= 1 required");
    detail::require(std::isfinite(c_ratio) && c_ratio >= 0.0,
                    "c_ratio: must be finite and >= 0");

    CapacitanceModel model;
    model.length = length;
    model.c_ratio = c_ratio;
    model.matrix = Matrix::Zero(length, length);
    for (int i = 0; i < length; ++i) {
        const int neighbours = (i > 0 ? 1 : 0) + (i + 1 < length ? 1 : 0);
        model.matrix(i, i) = 1.0 + neighbours * c_ratio;
        if (i + 1 < length) {
            model.matrix(i, i + 1) = -c_ratio;
            model.matrix(i + 1, i) = -c_ratio;
        }
    }

    if (c_ratio == 0.0) {
        model.inverse = Matrix::Identity(length, length);
        return model;
    }

    Eigen::LLT<Matrix> llt(model.matrix);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("capacitance matrix is not positive definite");
    }
    Matrix inverse = llt.solve(Matrix::Identity(length, length));
    model.inverse = 0.5 * (inverse + inverse.transpose());
    return model;
}

double interaction_range(const CapacitanceModel& model) {
    detail::require(model.c_ratio > 0.0,
                    "interaction_range: c_ratio > 0 required (no interaction beyond on-site)");
    detail::require(model.length >= 5, "interaction_range: L >= 5 required");

    // Fit window stays well inside the chain so the open ends do not bend the
    // exponential tail; at least three points.
    const int mid = (model.length - 1) / 2;
    const int half = model.length - 1 - mid;
    const int points = std::max(3, half / 3);

    double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
    for (int k = 1; k <= points; ++k) {
        const double y = std::log(std::abs(model.inverse(mid, mid + k)));
        sk += k;
        sy += y;
        skk += double(k) * k;
        sky += k * y;
    }
    const double n = points;
    const double slope = (n * sky - sk * sy) / (n * skk - sk * sk);
    if (!(slope < 0.0)) {
        throw NumericalError("interaction_range: interaction does not decay");
    }
    return -1.0 / slope;
}

} // namespace jjchain
