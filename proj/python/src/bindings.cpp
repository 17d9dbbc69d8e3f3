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

#include <algorithm>
#include <numbers>
#include <optional>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jjchain/dephasing.hpp"
#include "jjchain/electrostatics.hpp"
#include "jjchain/hamiltonian.hpp"
#include "jjchain/output.hpp"
#include "jjchain/peaks.hpp"
#include "jjchain/readout.hpp"
#include "jjchain/transfer.hpp"

namespace py = pybind11;
using namespace jjchain;

namespace {

ChainParams make_params(int length, double u0, double c_ratio, std::optional<std::vector<double>> qx,
                        std::optional<std::vector<double>> ej_bonds) {
    auto p = ChainParams::uniform(length, u0, c_ratio);
    if (qx) {
        p.qx = *qx;
    }
    if (ej_bonds) {
        p.ej_bonds = *ej_bonds;
    }
    p.validate();
    return p;
}

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

} // namespace

PYBIND11_MODULE(_jjchain, m) {
    m.doc() = "Quantum state transfer through a Josephson junction chain";

    static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const InvalidArgument& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const NumericalError& e) {
            numerical(e.what());
        }
    });

    m.def("version", &version);

    py::class_<ChainParams>(m, "ChainParams")
        .def(py::init(&make_params), py::arg("length"), py::arg("u0") = 10.0, py::arg("c_ratio") = 0.0,
             py::arg("qx") = py::none(), py::arg("ej_bonds") = py::none())
        .def_readonly("length", &ChainParams::length)
        .def_readonly("u0", &ChainParams::u0)
        .def_readonly("c_ratio", &ChainParams::c_ratio)
        .def_readonly("qx", &ChainParams::qx)
        .def_readonly("ej_bonds", &ChainParams::ej_bonds)
        .def("__repr__", [](const ChainParams& p) {
            return "ChainParams(length=" + std::to_string(p.length) + ", u0=" + format_double(p.u0) +
                   ", c_ratio=" + format_double(p.c_ratio) + ")";
        });

    m.def(
        "inverse_capacitance",
        [](int length, double c_ratio) { return build_capacitance_model(length, c_ratio).inverse; },
        py::arg("length"), py::arg("c_ratio"), "Normalised inverse capacitance matrix W = C0 C^-1.");

    m.def(
        "hamiltonian", [](const ChainParams& p) { return build_hamiltonian(p).h2; }, py::arg("params"),
        "One-pair charge block H2 in the site basis, energies in units of E_J.");

    m.def(
        "transfer_amplitude",
        [](const ChainParams& p, double t) { return transfer_amplitude(build_hamiltonian(p), t); },
        py::arg("params"), py::arg("t"));

    m.def("fidelity", py::overload_cast<Complex>(&fidelity_closed_form), py::arg("amplitude"),
          "Bloch-averaged fidelity 1/2 + |f|^2/6 + Re(f)/3.");

    m.def(
        "fidelity_series",
        [](const ChainParams& p, double t_max, double dt) {
            const auto s = fidelity_series(build_hamiltonian(p), t_max, dt);
            py::dict out;
            out["t"] = to_array(s.times);
            out["fidelity"] = to_array(s.fidelity);
            out["amplitude"] = to_array(s.amplitude);
            return out;
        },
        py::arg("params"), py::arg("t_max"), py::arg("dt") = 0.01);

    m.def(
        "first_maximum",
        [](const ChainParams& p, double t_max, double dt) {
            const Propagator prop(build_hamiltonian(p));
            const auto r = find_first_maximum(fidelity_series(prop, t_max, dt), prop);
            return py::make_tuple(r.t_peak, r.f_peak);
        },
        py::arg("params"), py::arg("t_max"), py::arg("dt") = 0.01, "(time, fidelity) of the first maximum.");

    m.def("stationary_fidelity", &stationary_fidelity, py::arg("length"));

    m.def(
        "evolve_dephasing",
        [](const ChainParams& p, double gamma, double t_max, double dt, double theta, double phi) {
            const auto model = build_capacitance_model(p.length, p.c_ratio);
            DephasingOptions o;
            o.t_max = t_max;
            o.dt = dt;
            o.sample_dt = std::max(0.05, dt);
            o.keep_states = false;
            const auto run = evolve_dephasing(input_state(p.length, theta, phi), build_hamiltonian(p, model),
                                              build_dephasing_rates(gamma, model), o);
            py::dict out;
            out["t"] = to_array(run.times);
            out["fidelity"] = to_array(run.fidelity);
            out["rho_LL"] = to_array(run.rho_LL);
            out["accepted_dt"] = run.accepted_dt;
            return out;
        },
        py::arg("params"), py::arg("gamma"), py::arg("t_max") = 100.0, py::arg("dt") = 0.002,
        py::arg("theta") = std::numbers::pi / 2.0, py::arg("phi") = 0.0);

    m.def(
        "evolve_readout",
        [](const ChainParams& p, double gamma_qp, double t_star, double theta, double phi, double dt) {
            ReadoutParams rp;
            rp.gamma_qp = gamma_qp;
            rp.t_star = t_star;
            rp.dt = dt;
            const auto run = evolve_readout(theta, phi, p, rp);
            py::dict out;
            out["t"] = to_array(run.times);
            out["current"] = to_array(run.current);
            out["p_vac"] = to_array(run.p_vac);
            out["p_qp"] = to_array(run.p_qp);
            out["rho_LL"] = to_array(run.rho_LL);
            out["integrated_current"] = run.integrated_current;
            out["pre_disconnect_charge"] = run.pre_disconnect_charge;
            out["post_disconnect_charge"] = run.post_disconnect_charge;
            out["approx_integrated_current"] = run.approx_integrated_current;
            return out;
        },
        py::arg("params"), py::arg("gamma_qp") = 0.05, py::arg("t_star") = 0.0,
        py::arg("theta") = std::numbers::pi, py::arg("phi") = 0.0, py::arg("dt") = 0.01);

    m.def(
        "current_vs_tstar",
        [](const ChainParams& p, double gamma_qp, std::vector<double> grid, double theta, double phi) {
            const auto rows = current_vs_tstar_sweep(p, gamma_qp, grid, theta, phi);
            std::vector<double> current, fidelity;
            for (const auto& r : rows) {
                current.push_back(r.integrated_current);
                fidelity.push_back(r.fidelity_isolated);
            }
            py::dict out;
            out["t_star"] = to_array(grid);
            out["integrated_current"] = to_array(current);
            out["fidelity_isolated"] = to_array(fidelity);
            return out;
        },
        py::arg("params"), py::arg("gamma_qp"), py::arg("t_star_grid"), py::arg("theta") = std::numbers::pi,
        py::arg("phi") = 0.0);
}
