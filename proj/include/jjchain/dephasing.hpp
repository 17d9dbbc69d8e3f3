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

#include <vector>

#include "jjchain/electrostatics.hpp"
#include "jjchain/hamiltonian.hpp"
#include "jjchain/liouville.hpp"
#include "jjchain/types.hpp"

namespace jjchain {

/// Density matrix over either the chain basis {vac, 1..L} or the readout
/// basis {vac, qp, 1..L}.
struct DensityMatrix {
    enum class Basis { chain, readout };

    Basis basis = Basis::chain;
    CMatrix rho;

    int dim() const { return static_cast<int>(rho.rows()); }
    int length() const { return dim() - (basis == Basis::chain ? 1 : 2); }
    static constexpr int vacuum_index() { return 0; }
    int qp_index() const;
    /// Row of island j, 1-based.
    int site_index(int j) const { return j + (basis == Basis::chain ? 0 : 1); }
};

/// Input qubit cos(theta/2)|vac> + e^{i phi} sin(theta/2)|1>, as a pure state.
DensityMatrix input_state(int length, double theta, double phi,
                          DensityMatrix::Basis basis = DensityMatrix::Basis::chain);

/// Pairwise dephasing rates D = (gamma/2) W^2 from gate-voltage noise that is
/// white and independent per island; W correlates it along the chain.
struct DephasingRates {
    double gamma = 0.0;
    Matrix D;
};

/// Throws InvalidArgument for negative gamma and NumericalError if D fails
/// the PSD check.
DephasingRates build_dephasing_rates(double gamma, const CapacitanceModel& model);

/// -i[H, rho] - sum_ij D_ij (P_i P_j rho - 2 P_i rho P_j + rho P_i P_j), P_i = |i><i|.
CMatrix dephasing_rhs(const DensityMatrix& rho, const ChargeSectorHamiltonian& h,
                      const DephasingRates& rates);

/// Vectorised generator of dephasing_rhs.
CMatrix dephasing_generator(const ChargeSectorHamiltonian& h, const DephasingRates& rates);

enum class FidelityEvaluation { closed_form, bloch_numeric };

struct DephasingOptions {
    double t_max = 100.0;
    double dt = 0.002;        ///< RK4 step
    double sample_dt = 0.05;  ///< snapshot spacing, rounded to a multiple of dt
    bool verify_step = false; ///< rerun at dt/2 and report the difference
    int max_refinements = 4;  ///< step halvings allowed after a failed state check
    bool keep_states = true;
    FidelityEvaluation fidelity = FidelityEvaluation::closed_form;
    StateTolerances tolerances{};
};

struct DephasingRun {
    std::vector<double> times;
    std::vector<DensityMatrix> states; ///< empty unless keep_states
    std::vector<double> fidelity;
    std::vector<double> rho_LL;
    std::vector<double> rho_11;
    std::vector<StateDiagnostics> diagnostics;
    double step_halving_error = 0.0; ///< max entrywise difference vs dt/2, if verified
    double accepted_dt = 0.0;        ///< step of the run that passed every state check
};

/// Bloch-averaged fidelity of the chain channel read from rho(t), given the
/// input rho0 on span{vac, |1>} with nonzero population and coherence.
double channel_fidelity(const DensityMatrix& rho, const DensityMatrix& rho0,
                        FidelityEvaluation mode = FidelityEvaluation::closed_form);

/// Integrates the dephasing master equation from rho0 (chain basis, supported
/// on span{vac, |1>}). Every snapshot is checked against the tolerances.
DephasingRun evolve_dephasing(const DensityMatrix& rho0, const ChargeSectorHamiltonian& h,
                              const DephasingRates& rates, const DephasingOptions& options);

/// Long-time fidelity 1/2 + 1/(6L) of the fully dephased chain.
double stationary_fidelity(int length);

} // namespace jjchain
