"""State metrics: fidelity, purity, partial trace, moments, trace distance."""

import numpy as np

from .operators import as_matrix
from .spaces import ModeSpace
from .states import DensityMatrix, TwoModeState


def _raw(state):
    if isinstance(state, TwoModeState):
        return state.amplitudes
    if isinstance(state, DensityMatrix):
        return state.matrix
    return np.asarray(state)


def fidelity(state_a, state_b):
    """Uhlmann fidelity, squared-overlap convention.

    pure/pure: |<a|b>|^2, pure/mixed: <a|rho|a>, mixed/mixed:
    (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
    """
    a, b = _raw(state_a), _raw(state_b)
    if a.ndim == 1 and b.ndim == 1:
        return float(abs(np.vdot(a, b)) ** 2)
    if a.ndim == 1:
        return float(np.real(np.vdot(a, b @ a)))
    if b.ndim == 1:
        return float(np.real(np.vdot(b, a @ b)))
    evals, evecs = np.linalg.eigh((a + a.conj().T) / 2)
    sqrt_a = (evecs * np.sqrt(np.clip(evals, 0, None))) @ evecs.conj().T
    inner = sqrt_a @ b @ sqrt_a
    s = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    return float(np.sum(np.sqrt(np.clip(s, 0, None))) ** 2)


def purity(state):
    """tr(rho^2); equals 1 for pure states."""
    m = _raw(state)
    if m.ndim == 1:
        return 1.0
    return float(np.real(np.trace(m @ m)))


def expectation(op, state):
    op = as_matrix(op)
    m = _raw(state)
    if m.ndim == 1:
        return complex(np.vdot(m, op @ m))
    return complex(np.trace(op @ m))


def variance(op, state):
    op = as_matrix(op)
    mean = expectation(op, state)
    second = expectation(op @ op, state)
    return float(np.real(second - mean**2))


def partial_trace(state, space: ModeSpace, keep="signal"):
    """Reduced density matrix of one mode of a joint state."""
    m = _raw(state)
    ns, npu = space.n_signal, space.n_pump
    if m.ndim == 1:
        psi = m.reshape(ns, npu)
        if keep == "signal":
            return psi @ psi.conj().T
        if keep == "pump":
            return psi.T @ psi.conj()
        raise ValueError("keep must be 'signal' or 'pump'")
    rho = m.reshape(ns, npu, ns, npu)
    if keep == "signal":
        return np.trace(rho, axis1=1, axis2=3)
    if keep == "pump":
        return np.trace(rho, axis1=0, axis2=2)
    raise ValueError("keep must be 'signal' or 'pump'")


def trace_distance(rho, sigma):
    """(1/2)||rho - sigma||_1 for Hermitian arguments."""
    d = _raw(rho) - _raw(sigma)
    evals = np.linalg.eigvalsh((d + d.conj().T) / 2)
    return float(0.5 * np.sum(np.abs(evals)))
