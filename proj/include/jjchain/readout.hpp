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

#include <span>
#include <vector>

#include "jjchain/dephasing.hpp"
#include "jjchain/hamiltonian.hpp"
#include "jjchain/liouville.hpp"
#include "jjchain/types.hpp"

namespace jjchain {

/// SET readout protocol. Rates in units of E_J, times in 1/E_J.
struct ReadoutParams {
    double gamma_qp = 0.05; ///< quasiparticle tunnelling rate
    double t_star = 0.0;    ///< disconnection time of the last bond
    double t_pulse = 1.0;   ///< pulse period T; currents are reported in units of e/T
    double t_tail = 0.0;    ///< post-disconnect horizon; 0 selects 40/gamma_qp
    double dt = 0.01;       ///< RK4 step
    int max_refinements = 4; ///< step halvings allowed after a failed state check
    double sample_dt = 0.05;

    void validate() const;
    double tail() const { return t_tail > 0.0 ? t_tail : 40.0 / gamma_qp; }
    /// Protocol validity (t_star << 1/gamma_qp); advisory only.
    bool disconnect_is_early() const { return gamma_qp * t_star < 0.1; }
};

/// Site-basis generator on {vac, qp, 1..L}: the last island empties into the
/// quasiparticle state at rate gamma, which empties into vac at rate gamma.
/// The charge block evolves with -i[H2, rho] - (gamma/2){|L><L|, rho}. With
/// connected == false the bond (L-1, L) is removed.
struct ReadoutGenerator {
    Matrix h2;
    double gamma = 0.0;
    bool connected = true;

    int dim() const { return static_cast<int>(h2.rows()) + 2; }
    CMatrix apply(const CMatrix& rho) const;
    /// Vectorised form of apply.
    CMatrix matrix() const;
};

ReadoutGenerator build_readout_generator(const ChargeSectorHamiltonian& h, double gamma, bool connected);

struct ReadoutResult {
    std::vector<double> times;
    std::vector<double> current; ///< instantaneous particle current gamma (rho_LL + p_qp)
    std::vector<double> p_vac;
    std::vector<double> p_qp;
    std::vector<double> rho_LL;
    std::vector<StateDiagnostics> diagnostics;
    std::vector<DensityMatrix> states; ///< filled only on request

    double integrated_current = 0.0;        ///< integral of the current over the whole run, units e/T
    double pre_disconnect_charge = 0.0;     ///< integral over [0, t_star]
    double post_disconnect_charge = 0.0;    ///< integral over [t_star, t_star + tail]
    double approx_integrated_current = 0.0; ///< 2 rho_LL(t*) + p_qp(t*)
    double rho_LL_at_disconnect = 0.0;
    double p_qp_at_disconnect = 0.0;
    double accepted_dt = 0.0; ///< step of the run that passed every state check
};

/// Runs the protocol from cos(theta/2)|vac> + e^{i phi} sin(theta/2)|1>.
ReadoutResult evolve_readout(double theta, double phi, const ChainParams& params,
                             const ReadoutParams& rp, bool keep_states = false);

/// Same protocol from an arbitrary readout-basis state.
ReadoutResult evolve_readout(const DensityMatrix& rho0, const ChargeSectorHamiltonian& h,
                             const ReadoutParams& rp, bool keep_states = false);

struct CurrentSweepRow {
    double t_star = 0.0;
    double integrated_current = 0.0;
    double approx_integrated_current = 0.0;
    double fidelity_isolated = 0.0;
    double rho_LL = 0.0;
    double p_qp = 0.0;
};

/// Integrated current as a function of the disconnection time. One connected
/// run covers the grid; each tail is integrated on the decoupled cascade of
/// (rho_LL, p_qp), which is exact once the last bond is removed.
std::vector<CurrentSweepRow> current_vs_tstar_sweep(const ChainParams& params, double gamma,
                                                    std::span<const double> t_star_grid,
                                                    double theta, double phi,
                                                    const ReadoutParams& base = {});

struct PeakPair {
    double current_time = 0.0;
    double fidelity_time = 0.0; ///< nearest fidelity peak
    double offset = 0.0;        ///< |current_time - fidelity_time|
};

/// Pairs each prominent current peak with the nearest prominent peak of the
/// isolated-chain fidelity. Peak times are refined by parabolic interpolation
/// on the t_star grid, which must be uniform.
std::vector<PeakPair> align_current_peaks(const std::vector<CurrentSweepRow>& rows,
                                          double current_prominence = 0.02,
                                          double fidelity_prominence = 0.02);

/// Decay time of a post-disconnect current trace, fitted to the two-stage
/// cascade shape (a + b s) exp(-s / tau), s = t - times.front().
double fit_cascade_decay(std::span<const double> times, std::span<const double> current);

} // namespace jjchain
