"""opaqnd: two-mode quadratic-interaction simulator on truncated Fock spaces.

A desk-scale numerical laboratory for a phase-mismatched optical
parametric amplifier/oscillator: nondemolition photon-number readout of
the signal through pump displacements, grid-state preparation in the pump
by modular quadrature measurement, and continuously monitored cavity
trajectories.
"""

__version__ = "0.1.0"

from . import conventions
from .operators import ModeOperator, OperatorSet, make_operators
from .params import (
    BogoliubovDomainError,
    SystemParams,
    bogoliubov_params,
    params_from_targets,
)
from .spaces import ModeSpace, TruncationError, check_truncation_health, top_level_population
from .states import (
    DensityMatrix,
    TwoModeState,
    bogoliubov_coherent_state,
    coherent_state,
    displacement_matrix,
    fock_state,
    product_state,
    squeeze_matrix,
    squeezed_number_state,
    squeezed_vacuum_pump,
    vacuum_state,
)

__all__ = [
    "conventions",
    "ModeOperator",
    "OperatorSet",
    "make_operators",
    "BogoliubovDomainError",
    "SystemParams",
    "bogoliubov_params",
    "params_from_targets",
    "ModeSpace",
    "TruncationError",
    "check_truncation_health",
    "top_level_population",
    "DensityMatrix",
    "TwoModeState",
    "bogoliubov_coherent_state",
    "coherent_state",
    "displacement_matrix",
    "fock_state",
    "product_state",
    "squeeze_matrix",
    "squeezed_number_state",
    "squeezed_vacuum_pump",
    "vacuum_state",
]
