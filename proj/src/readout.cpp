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

#include "jjchain/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/tools/minima.hpp>

#include "jjchain/peaks.hpp"
#include "jjchain/transfer.hpp"

namespace jjchain {

void ReadoutParams::validate() const {
    detail::require(std::isfinite(gamma_qp) && gamma_qp > 0.0, "gamma_qp: must be > 0");
    detail::require(std::isfinite(t_star) && t_star >= 0.0, "t_star: must be >= 0");
    detail::require(std::isfinite(t_pulse) && t_pulse > 0.0, "t_pulse: must be > 0");
    detail::require(std::isfinite(t_tail) && t_tail >= 0.0, "t_tail: must be >= 0");
    detail::require(t_tail == 0.0 || t_tail * gamma_qp >= 20.0, "t_tail: must be >= 20/gamma_qp");
    detail::require(std::isfinite(dt) && dt > 0.0, "dt: must be > 0");
    detail::require(std::isfinite(sample_dt) && sample_dt >= dt, "sample_dt: must be >= dt");
    detail::require(max_refinements >= 0, "max_refinements: must be >= 0");
}

ReadoutGenerator build_readout_generator(const ChargeSectorHamiltonian& h, double gamma, bool connected) {
    detail::require(std::isfinite(gamma) && gamma >= 0.0, "gamma_qp: must be >= 0");
    ReadoutGenerator g;
    g.h2 = h.h2;
    g.gamma = gamma;
    g.connected = connected;
    const int n = h.length();
    if (!connected && n >= 2) {
        g.h2(n - 2, n - 1) = 0.0;
        g.h2(n - 1, n - 2) = 0.0;
    }
    return g;
}

CMatrix ReadoutGenerator::apply(const CMatrix& rho) const {
    const int n = static_cast<int>(h2.rows());
    const int d = n + 2;
    detail::require(rho.rows() == d && rho.cols() == d, "readout generator: dimension mismatch");
    constexpr int vac = 0;
    constexpr int qp = 1;
    const int last = n + 1;

    CMatrix hfull = CMatrix::Zero(d, d);
    hfull.bottomRightCorner(n, n) = h2.cast<Complex>();
    CMatrix out = Complex(0.0, -1.0) * (hfull * rho - rho * hfull);

    // Two incoherent hops, |L> -> |qp> and |qp> -> |vac>, each at rate gamma:
    // gain terms on the populations and anticommutator damping elsewhere.
    out(qp, qp) += gamma * rho(last, last);
    out(vac, vac) += gamma * rho(qp, qp);
    for (int k = 0; k < d; ++k) {
        out(last, k) -= 0.5 * gamma * rho(last, k);
        out(k, last) -= 0.5 * gamma * rho(k, last);
        out(qp, k) -= 0.5 * gamma * rho(qp, k);
        out(k, qp) -= 0.5 * gamma * rho(k, qp);
    }
    return out;
}

CMatrix ReadoutGenerator::matrix() const {
    return superoperator([this](const CMatrix& m) { return apply(m); }, dim());
}

namespace {

// Generator extended by one row that accumulates the emitted particle number
// gamma * integral (rho_LL + p_qp).
CMatrix with_counter(const ReadoutGenerator& g) {
    const int d = g.dim();
    const int n = d * d;
    CMatrix out = CMatrix::Zero(n + 1, n + 1);
    out.topLeftCorner(n, n) = g.matrix();
    const int last = d - 1;
    out(n, last * d + last) = g.gamma;
    out(n, 1 * d + 1) = g.gamma;
    return out;
}

struct Stage {
    long samples;
    long steps_per_sample;
    double step;
};

Stage plan_stage(double duration, double sample_dt, double dt) {
    if (duration <= 0.0) {
        return {0, 0, dt};
    }
    const long samples = std::max(1L, static_cast<long>(std::ceil(duration / sample_dt - 1e-9)));
    const double per_sample = duration / static_cast<double>(samples);
    const long steps = std::max(1L, static_cast<long>(std::ceil(per_sample / dt - 1e-9)));
    return {samples, steps, per_sample / static_cast<double>(steps)};
}

} // namespace

namespace {

ReadoutResult evolve_readout_fixed(const DensityMatrix& rho0, const ChargeSectorHamiltonian& h,
                                   const ReadoutParams& rp, bool keep_states) {
    const int n = h.length();
    const int d = n + 2;
    detail::require(rho0.basis == DensityMatrix::Basis::readout && rho0.dim() == d,
                    "evolve_readout: rho0 must live on {vac, qp, 1..L}");
    const auto d0 = diagnose(rho0.rho);
    detail::require(d0.trace_error <= 1e-10 && d0.hermiticity_error <= 1e-12 && d0.min_eigenvalue >= -1e-9,
                    "evolve_readout: rho0 is not a valid density matrix");

    const int last = d - 1;
    const int qp = 1;
    ReadoutResult out;

    CVector x(d * d + 1);
    x.head(d * d) = vectorize(rho0.rho);
    x(d * d) = 0.0;
    double t = 0.0;

    auto record = [&](const CVector& state, double time) {
        const CMatrix rho = unvectorize(state.head(d * d), d);
        const auto diag = diagnose(rho);
        check_state(diag, time);
        out.times.push_back(time);
        out.p_vac.push_back(rho(0, 0).real());
        out.p_qp.push_back(rho(qp, qp).real());
        out.rho_LL.push_back(rho(last, last).real());
        out.current.push_back(rp.gamma_qp * (rho(last, last).real() + rho(qp, qp).real()));
        out.diagnostics.push_back(diag);
        if (keep_states) {
            out.states.push_back(DensityMatrix{DensityMatrix::Basis::readout, rho});
        }
    };

    auto run_stage = [&](bool connected, double duration) {
        const Stage stage = plan_stage(duration, rp.sample_dt, rp.dt);
        if (stage.samples == 0) {
            return;
        }
        const Rk4Propagator rk4(with_counter(build_readout_generator(h, rp.gamma_qp, connected)),
                                stage.step);
        const double t0 = t;
        for (long s = 1; s <= stage.samples; ++s) {
            x = rk4.advance(x, stage.steps_per_sample);
            t = (s == stage.samples) ? t0 + duration
                                     : t0 + static_cast<double>(s * stage.steps_per_sample) * stage.step;
            record(x, t);
        }
    };

    record(x, 0.0);
    run_stage(true, rp.t_star);

    const CMatrix at_disconnect = unvectorize(x.head(d * d), d);
    out.rho_LL_at_disconnect = at_disconnect(last, last).real();
    out.p_qp_at_disconnect = at_disconnect(qp, qp).real();
    out.approx_integrated_current = 2.0 * out.rho_LL_at_disconnect + out.p_qp_at_disconnect;
    out.pre_disconnect_charge = x(d * d).real();

    run_stage(false, rp.tail());
    out.integrated_current = x(d * d).real();
    out.post_disconnect_charge = out.integrated_current - out.pre_disconnect_charge;
    out.accepted_dt = rp.dt;
    return out;
}

// Reruns body with the step halved each time a state check fails.
template <typename Body>
auto with_step_refinement(const ReadoutParams& rp, Body body) {
    ReadoutParams attempt = rp;
    for (int k = 0;; ++k) {
        try {
            return body(attempt);
        } catch (const StateCheckFailed&) {
            if (k >= rp.max_refinements) {
                throw;
            }
            attempt.dt *= 0.5;
        }
    }
}

} // namespace

ReadoutResult evolve_readout(const DensityMatrix& rho0, const ChargeSectorHamiltonian& h,
                             const ReadoutParams& rp, bool keep_states) {
    rp.validate();
    return with_step_refinement(rp, [&](const ReadoutParams& attempt) {
        return evolve_readout_fixed(rho0, h, attempt, keep_states);
    });
}

ReadoutResult evolve_readout(double theta, double phi, const ChainParams& params,
                             const ReadoutParams& rp, bool keep_states) {
    params.validate();
    const auto h = build_hamiltonian(params);
    return evolve_readout(input_state(params.length, theta, phi, DensityMatrix::Basis::readout), h, rp,
                          keep_states);
}

namespace {

std::vector<CurrentSweepRow> sweep_fixed(const ChainParams& params, double gamma,
                                         std::span<const double> t_star_grid, double theta, double phi,
                                         const ReadoutParams& rp) {
    for (std::size_t k = 0; k < t_star_grid.size(); ++k) {
        detail::require(t_star_grid[k] >= 0.0 && (k == 0 || t_star_grid[k] > t_star_grid[k - 1]),
                        "t_star grid: must be nonnegative and increasing");
    }

    const auto h = build_hamiltonian(params);
    const Propagator isolated(h);
    const int n = h.length();
    const int d = n + 2;
    const int last = d - 1;
    const int qp = 1;

    const CMatrix connected = with_counter(build_readout_generator(h, gamma, true));
    std::map<long, Rk4Propagator> steppers;

    // Decoupled cascade after disconnection: (rho_LL, p_qp, count).
    CMatrix cascade = CMatrix::Zero(3, 3);
    cascade(0, 0) = -gamma;
    cascade(1, 0) = gamma;
    cascade(1, 1) = -gamma;
    cascade(2, 0) = gamma;
    cascade(2, 1) = gamma;
    // The cascade only carries the rate gamma, so its step is set by gamma h = 0.01
    // rather than by the chain's dt; the whole tail is composed into one map.
    const long tail_steps = std::max(1L, static_cast<long>(std::ceil(rp.tail() * gamma / 0.01 - 1e-9)));
    const Rk4Propagator tail_step(cascade, rp.tail() / static_cast<double>(tail_steps));
    CMatrix tail_map(3, 3);
    for (int k = 0; k < 3; ++k) {
        tail_map.col(k) = tail_step.advance(CVector::Unit(3, k), tail_steps);
    }

    CVector x(d * d + 1);
    x.head(d * d) = vectorize(input_state(n, theta, phi, DensityMatrix::Basis::readout).rho);
    x(d * d) = 0.0;
    double t = 0.0;

    std::vector<CurrentSweepRow> rows;
    rows.reserve(t_star_grid.size());
    for (double t_star : t_star_grid) {
        const double span = t_star - t;
        if (span > 0.0) {
            const long steps = std::max(1L, static_cast<long>(std::ceil(span / rp.dt - 1e-9)));
            const double step = span / static_cast<double>(steps);
            const long key = std::lround(step * 1e12);
            auto it = steppers.find(key);
            if (it == steppers.end()) {
                it = steppers.emplace(key, Rk4Propagator(connected, step)).first;
            }
            x = it->second.advance(x, steps);
            t = t_star;
        }
        const CMatrix rho = unvectorize(x.head(d * d), d);
        check_state(diagnose(rho), t);

        CVector c(3);
        c << rho(last, last), rho(qp, qp), 0.0;
        c = tail_map * c;

        CurrentSweepRow row;
        row.t_star = t_star;
        row.rho_LL = rho(last, last).real();
        row.p_qp = rho(qp, qp).real();
        row.integrated_current = x(d * d).real() + c(2).real();
        row.approx_integrated_current = 2.0 * row.rho_LL + row.p_qp;
        row.fidelity_isolated = fidelity_closed_form(isolated.transfer(t_star));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

std::vector<CurrentSweepRow> current_vs_tstar_sweep(const ChainParams& params, double gamma,
                                                    std::span<const double> t_star_grid,
                                                    double theta, double phi,
                                                    const ReadoutParams& base) {
    params.validate();
    ReadoutParams rp = base;
    rp.gamma_qp = gamma;
    rp.validate();
    return with_step_refinement(rp, [&](const ReadoutParams& attempt) {
        return sweep_fixed(params, gamma, t_star_grid, theta, phi, attempt);
    });
}

namespace {

// Vertex of the parabola through samples k-1, k, k+1 of a uniform grid.
double parabolic_vertex(const std::vector<double>& t, const std::vector<double>& v, std::size_t k) {
    if (k == 0 || k + 1 >= v.size()) {
        return t[k];
    }
    const double curvature = v[k - 1] - 2.0 * v[k] + v[k + 1];
    if (!(curvature < 0.0)) {
        return t[k];
    }
    const double h = 0.5 * (t[k + 1] - t[k - 1]);
    return t[k] + 0.5 * h * (v[k - 1] - v[k + 1]) / curvature;
}

} // namespace

std::vector<PeakPair> align_current_peaks(const std::vector<CurrentSweepRow>& rows,
                                          double current_prominence, double fidelity_prominence) {
    std::vector<double> times, current, fidelity;
    for (const auto& r : rows) {
        times.push_back(r.t_star);
        current.push_back(r.integrated_current);
        fidelity.push_back(r.fidelity_isolated);
    }
    std::vector<double> fidelity_times;
    for (std::size_t j : prominent_peaks(fidelity, fidelity_prominence)) {
        fidelity_times.push_back(parabolic_vertex(times, fidelity, j));
    }
    std::vector<PeakPair> out;
    if (fidelity_times.empty()) {
        return out;
    }
    for (std::size_t k : prominent_peaks(current, current_prominence)) {
        PeakPair pair;
        pair.current_time = parabolic_vertex(times, current, k);
        pair.offset = std::numeric_limits<double>::infinity();
        for (double tf : fidelity_times) {
            const double off = std::abs(tf - pair.current_time);
            if (off < pair.offset) {
                pair.offset = off;
                pair.fidelity_time = tf;
            }
        }
        out.push_back(pair);
    }
    return out;
}

double fit_cascade_decay(std::span<const double> times, std::span<const double> current) {
    detail::require(times.size() == current.size() && times.size() >= 4,
                    "fit_cascade_decay: need at least 4 matching samples");
    const double t0 = times.front();

    // For fixed rate k the prefactor (a + b s) is a linear least-squares problem.
    auto residual = [&](double log_rate) {
        const double k = std::exp(log_rate);
        Eigen::Matrix2d normal = Eigen::Matrix2d::Zero();
        Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double s = times[i] - t0;
            const double e = std::exp(-k * s);
            const Eigen::Vector2d basis(e, s * e);
            normal += basis * basis.transpose();
            rhs += basis * current[i];
        }
        const Eigen::Vector2d coef = normal.ldlt().solve(rhs);
        double sum = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double s = times[i] - t0;
            const double r = current[i] - (coef(0) + coef(1) * s) * std::exp(-k * s);
            sum += r * r;
        }
        return sum;
    };

    double weight = 0.0, moment = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double w = 0.5 * (current[i] + current[i + 1]) * (times[i + 1] - times[i]);
        weight += w;
        moment += w * (0.5 * (times[i] + times[i + 1]) - t0);
    }
    if (!(weight > 0.0 && moment > 0.0)) {
        throw NumericalError("fit_cascade_decay: current trace carries no charge");
    }
    const double guess = moment / weight;
    // The residual is not unimodal in the rate, so locate the basin on a grid before polishing.
    const double lo = std::log(0.05 / guess), hi = std::log(50.0 / guess);
    constexpr int grid = 200;
    const double step = (hi - lo) / grid;
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int g = 0; g <= grid; ++g) {
        const double v = residual(lo + g * step);
        if (v < best_value) {
            best_value = v;
            best = g;
        }
    }
    const auto [log_rate, value] = boost::math::tools::brent_find_minima(
        residual, lo + std::max(best - 1, 0) * step, lo + std::min(best + 1, grid) * step,
        std::numeric_limits<double>::digits / 2);
    (void)value;
    return std::exp(-log_rate);
}

} // namespace jjchain
