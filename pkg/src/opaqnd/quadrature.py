"""Quadrature wavefunctions of number states.

With x = (a + a^dag)/2 the position wavefunctions are scaled Hermite
functions,

    psi_0(x)   = (2/pi)^(1/4) exp(-x^2)
    psi_n+1(x) = 2x/sqrt(n+1) psi_n(x) - sqrt(n/(n+1)) psi_n-1(x),

orthonormal with respect to dx.  Momentum wavefunctions follow from the
Fourier kernel exp(2ipx)/sqrt(pi):  <p|n> = (-i)^n psi_n(p).  The phase
factor matters for coherences between different number states and is kept
exactly.
"""

import numpy as np


def hermite_functions(n_max, xs):
    """Array of shape (n_max+1, len(xs)) with psi_n(xs) for n = 0..n_max."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    out = np.zeros((n_max + 1, xs.size))
    out[0] = (2.0 / np.pi) ** 0.25 * np.exp(-(xs**2))
    if n_max >= 1:
        out[1] = 2.0 * xs * out[0]
    for n in range(1, n_max):
        out[n + 1] = (2.0 * xs / np.sqrt(n + 1)) * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def quadrature_wavefunction(n, q):
    """Position-quadrature amplitude <q|n> (real)."""
    if n < 0:
        raise ValueError("Fock index must be non-negative")
    scalar = np.isscalar(q)
    vals = hermite_functions(n, q)[n]
    return float(vals[0]) if scalar else vals


def momentum_wavefunction(n, p):
    """Momentum-quadrature amplitude <p|n> = (-i)^n psi_n(p)."""
    return (-1j) ** n * quadrature_wavefunction(n, p)


def position_amplitudes(coeffs, xs):
    """<x|psi> on a grid for a Fock-basis state vector."""
    coeffs = np.asarray(coeffs)
    basis = hermite_functions(len(coeffs) - 1, xs)
    return coeffs @ basis.astype(complex)


def momentum_amplitudes(coeffs, ps):
    """<p|psi> on a grid for a Fock-basis state vector."""
    coeffs = np.asarray(coeffs)
    n = np.arange(len(coeffs))
    basis = hermite_functions(len(coeffs) - 1, ps).astype(complex)
    return (coeffs * (-1j) ** n) @ basis


def projector_matrix(n_levels, qs, kind="position"):
    """Matrix P[k, n] = <q_k|n> for n < n_levels on the grid qs."""
    basis = hermite_functions(n_levels - 1, qs).astype(complex)
    if kind == "momentum":
        basis = basis * ((-1j) ** np.arange(n_levels))[:, None]
    elif kind != "position":
        raise ValueError("kind must be 'position' or 'momentum'")
    return basis.T.copy()


def uniform_grid(q_min=-8.0, q_max=8.0, dq=0.02):
    """Inclusive uniform grid, the default quadrature sampling."""
    n = int(round((q_max - q_min) / dq))
    return q_min + dq * np.arange(n + 1)
