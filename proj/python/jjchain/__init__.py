# Copyright 2026 The jjchain Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Quantum state transfer through a Josephson junction chain."""

try:
    from ._jjchain import *  # noqa: F401,F403
    from ._jjchain import NumericalError, version
except ImportError:  # in-tree build: the extension sits next to the package
    from _jjchain import *  # noqa: F401,F403
    from _jjchain import NumericalError, version

__version__ = version()
__all__ = [
    "ChainParams",
    "NumericalError",
    "current_vs_tstar",
    "evolve_dephasing",
    "evolve_readout",
    "fidelity",
    "fidelity_series",
    "first_maximum",
    "hamiltonian",
    "inverse_capacitance",
    "stationary_fidelity",
    "transfer_amplitude",
    "version",
]
