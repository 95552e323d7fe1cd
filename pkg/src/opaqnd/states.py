"""State factories and the two working state containers.

Pure single-mode states are plain complex vectors; the containers below
wrap joint pure states and mixed states together with their ModeSpace.
Squeeze and displacement operators are built as matrix exponentials of
their generators, so they are unitary to machine precision on the
truncated space.  The phase convention of the squeeze operator is pinned
by the eigen-relation tests: number states of the squeezed basis must be
eigenvectors of A^dag A with A = a cosh(u) + a^dag sinh(u).
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import conventions
from .operators import bogoliubov_number, destroy
from .spaces import ModeSpace, check_truncation_health

NORM_TOL = 1e-10


def fock_state(dim, n):
    if not 0 <= n < dim:
        raise ValueError(f"Fock level {n} outside truncation {dim}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def vacuum_state(dim):
    return fock_state(dim, 0)


def displacement_matrix(dim, alpha):
    """D(alpha) = exp(alpha a^dag - conj(alpha) a).

    Displaces quadratures by <x> -> <x> + Re(alpha), <p> -> <p> + Im(alpha).
    """
    a = destroy(dim)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def squeeze_matrix(dim, z):
    """S(z) = exp((conj(z) a^2 - z a^dag^2)/2).

    For real z = s this sends x -> e^-s x, p -> e^s p in the Heisenberg
    picture, i.e. s > 0 squeezes the x quadrature of the vacuum.
    """
    a = destroy(dim)
    return expm((np.conj(z) * (a @ a) - z * (a.conj().T @ a.conj().T)) / 2.0)


def coherent_state(dim, alpha, check=True, tol=1e-8):
    psi = displacement_matrix(dim, alpha)[:, 0].copy()
    if check:
        check_truncation_health(psi, tol=tol, what=f"coherent state alpha={alpha}")
    return psi


def squeezed_number_state(dim, u, N, check=True, tol=1e-8):
    """Number state of the squeezed basis: S(u)|N>.

    Eigenstate of the squeezed-basis number operator with eigenvalue N.
    For u = 0 this is the bare Fock state |N>.
    """
    if not 0 <= N < dim:
        raise ValueError(f"level {N} outside truncation {dim}")
    psi = squeeze_matrix(dim, u)[:, N].copy()
    if check:
        check_truncation_health(psi, tol=tol, what=f"squeezed number state (u={u}, N={N})")
    return psi


def bogoliubov_coherent_state(dim, u, A, check=True, tol=1e-8):
    """Coherent excitation of the squeezed basis: S(u)|alpha=A>.

    Eigenstate of A_op = a cosh(u) + a^dag sinh(u) with eigenvalue A;
    physically a displaced squeezed state.
    """
    psi = squeeze_matrix(dim, u) @ coherent_state(dim, A, check=False)
    if check:
        check_truncation_health(psi, tol=tol, what=f"squeezed-basis coherent state (u={u}, A={A})")
    return psi


def squeezed_vacuum_pump(dim, w, check=True, tol=1e-8):
    """Gaussian pure state whose p-quadrature standard deviation is w.

    w < 1/2 is p-squeezed, w = 1/2 the vacuum, w > 1/2 anti-squeezed.
    """
    if w <= 0:
        raise ValueError("width must be positive")
    s = np.log(w / conventions.VACUUM_WIDTH)  # e^s = w/w0
    psi = squeeze_matrix(dim, s)[:, 0].copy()
    if check:
        check_truncation_health(psi, tol=tol, what=f"squeezed vacuum (w={w})")
    return psi


def eigen_residual(operator, state, eigenvalue):
    """Norm of (O - lambda)|psi>, the defect of an eigen-relation."""
    return float(np.linalg.norm(operator @ state - eigenvalue * state))


def squeezed_number_residual(dim, u, N, state=None):
    """Residual of the number eigen-relation in the squeezed basis."""
    if state is None:
        state = squeezed_number_state(dim, u, N, check=False)
    return eigen_residual(bogoliubov_number(dim, u), state, N)


@dataclass(frozen=True)
class TwoModeState:
    """Pure state on the joint signal-pump space (signal index major)."""

    amplitudes: np.ndarray
    space: ModeSpace

    def __post_init__(self):
        if self.amplitudes.shape != (self.space.dim,):
            raise ValueError("amplitude vector does not match the joint dimension")

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        return TwoModeState(self.amplitudes / self.norm, self.space)

    def as_matrix(self):
        return self.space.reshape(self.amplitudes)

    def require_normalized(self, tol=NORM_TOL):
        if abs(self.norm - 1.0) > tol:
            raise ValueError(f"state norm {self.norm} deviates from 1 beyond {tol}")
        return self


def product_state(signal, pump, space: ModeSpace) -> TwoModeState:
    if len(signal) != space.n_signal or len(pump) != space.n_pump:
        raise ValueError("factor dimensions do not match the mode space")
    return TwoModeState(np.kron(np.asarray(signal), np.asarray(pump)), space)


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state on the joint space."""

    matrix: np.ndarray
    space: ModeSpace

    def __post_init__(self):
        if self.matrix.shape != (self.space.dim, self.space.dim):
            raise ValueError("density matrix does not match the joint dimension")

    @property
    def trace(self):
        return complex(np.trace(self.matrix))

    def check(self, herm_tol=1e-10, trace_tol=1e-8, eig_tol=1e-8):
        """Validate hermiticity, unit trace and positivity."""
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > herm_tol:
            raise ValueError("density matrix is not Hermitian within tolerance")
        if abs(self.trace - 1.0) > trace_tol:
            raise ValueError(f"trace {self.trace} deviates from 1")
        eigs = np.linalg.eigvalsh((m + m.conj().T) / 2)
        if eigs.min() < -eig_tol:
            raise ValueError(f"negative eigenvalue {eigs.min():.3e}")
        return self

    @classmethod
    def from_state(cls, state: TwoModeState):
        v = state.amplitudes
        return cls(np.outer(v, v.conj()), state.space)
