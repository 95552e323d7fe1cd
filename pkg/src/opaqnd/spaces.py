"""Truncated two-mode Hilbert space bookkeeping.

The joint space is signal (x) pump with the signal index major: a joint
state vector of length n_signal * n_pump reshapes to (n_signal, n_pump).
"""

from dataclasses import dataclass

import numpy as np


class TruncationError(RuntimeError):
    """Raised when a state carries too much population at the top Fock level."""


@dataclass(frozen=True)
class ModeSpace:
    """Fock-level truncations of the signal and pump modes."""

    n_signal: int
    n_pump: int

    def __post_init__(self):
        if self.n_signal < 2 or self.n_pump < 2:
            raise ValueError("each mode needs at least two Fock levels")

    @property
    def dim(self):
        return self.n_signal * self.n_pump

    def reshape(self, amplitudes):
        """View a joint state vector as an (n_signal, n_pump) matrix."""
        amplitudes = np.asarray(amplitudes)
        return amplitudes.reshape(self.n_signal, self.n_pump)


def top_level_population(state, space=None):
    """Population at the highest retained Fock level(s).

    For a single-mode vector this is |c[-1]|^2.  For a joint vector (with
    `space` given) and for density matrices, the populations of the top
    signal and top pump levels are summed and the larger of the two is
    returned.  The value is the standard truncation-health indicator: it
    should stay far below 1 for any state the truncation represents
    faithfully.
    """
    state = np.asarray(state)
    if state.ndim == 1 and space is None:
        return float(abs(state[-1]) ** 2)
    if state.ndim == 1:
        mat = space.reshape(state)
        top_sig = float(np.sum(np.abs(mat[-1, :]) ** 2))
        top_pump = float(np.sum(np.abs(mat[:, -1]) ** 2))
        return max(top_sig, top_pump)
    # density matrix
    pops = np.real(np.diag(state))
    if space is None:
        return float(pops[-1])
    grid = pops.reshape(space.n_signal, space.n_pump)
    return max(float(np.sum(grid[-1, :])), float(np.sum(grid[:, -1])))


def check_truncation_health(state, space=None, tol=1e-8, what="state"):
    """Raise TruncationError if the top-level population exceeds `tol`."""
    pop = top_level_population(state, space)
    if pop > tol:
        raise TruncationError(
            f"{what}: top-level population {pop:.3e} exceeds tolerance {tol:.1e}; "
            "increase the Fock truncation"
        )
    return pop
