"""Dense mode operators on truncated Fock spaces.

All operators are plain complex numpy matrices in the number basis.
Single-mode operators act on one mode; `embed_signal` / `embed_pump`
lift them to the joint space by tensoring with the identity.
"""

from dataclasses import dataclass

import numpy as np

from .spaces import ModeSpace


@dataclass(frozen=True)
class ModeOperator:
    """A labelled dense operator together with the subsystem it acts on."""

    matrix: np.ndarray
    acts_on: str  # 'signal' | 'pump' | 'joint'
    label: str

    def dag(self):
        return ModeOperator(self.matrix.conj().T, self.acts_on, self.label + "^dag")


def as_matrix(op):
    """Accept either a ModeOperator or a bare ndarray."""
    return op.matrix if isinstance(op, ModeOperator) else np.asarray(op)


def destroy(dim):
    """Annihilation operator: a|n> = sqrt(n)|n-1>."""
    if dim < 2:
        raise ValueError("operator dimension must be at least 2")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def create(dim):
    return destroy(dim).conj().T


def number(dim):
    if dim < 2:
        raise ValueError("operator dimension must be at least 2")
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def position(dim):
    """x = (a + a^dag)/2, vacuum variance 1/4."""
    a = destroy(dim)
    return (a + a.conj().T) / 2.0


def momentum(dim):
    """p = (a - a^dag)/(2i), vacuum variance 1/4."""
    a = destroy(dim)
    return (a - a.conj().T) / 2.0j


def identity(dim):
    return np.eye(dim, dtype=complex)


def bogoliubov_destroy(dim, u):
    """Annihilation operator of the squeezed-basis excitation.

    A = a cosh(u) + a^dag sinh(u).  Its number operator A^dag A is
    diagonalized by squeezed photon-number states.
    """
    a = destroy(dim)
    return np.cosh(u) * a + np.sinh(u) * a.conj().T


def bogoliubov_number(dim, u):
    A = bogoliubov_destroy(dim, u)
    return A.conj().T @ A


def commutator(a, b):
    return a @ b - b @ a


def embed_signal(matrix, space: ModeSpace):
    """Lift a signal-mode operator to the joint space (signal index major)."""
    return np.kron(as_matrix(matrix), identity(space.n_pump))


def embed_pump(matrix, space: ModeSpace):
    return np.kron(identity(space.n_signal), as_matrix(matrix))


@dataclass(frozen=True)
class OperatorSet:
    """The standard single-mode operators of both modes plus joint embeddings."""

    space: ModeSpace
    # single-mode, signal
    a: ModeOperator
    adag: ModeOperator
    x_a: ModeOperator
    p_a: ModeOperator
    n_a: ModeOperator
    # single-mode, pump
    b: ModeOperator
    bdag: ModeOperator
    x_b: ModeOperator
    p_b: ModeOperator
    n_b: ModeOperator
    # joint embeddings
    a_j: ModeOperator
    adag_j: ModeOperator
    x_a_j: ModeOperator
    p_a_j: ModeOperator
    n_a_j: ModeOperator
    b_j: ModeOperator
    bdag_j: ModeOperator
    x_b_j: ModeOperator
    p_b_j: ModeOperator
    n_b_j: ModeOperator


def make_operators(space: ModeSpace) -> OperatorSet:
    """Build annihilation, creation, quadrature and number operators for
    both modes, together with their joint-space embeddings."""
    ns, npu = space.n_signal, space.n_pump
    sig = {
        "a": destroy(ns),
        "adag": create(ns),
        "x_a": position(ns),
        "p_a": momentum(ns),
        "n_a": number(ns),
    }
    pum = {
        "b": destroy(npu),
        "bdag": create(npu),
        "x_b": position(npu),
        "p_b": momentum(npu),
        "n_b": number(npu),
    }
    kw = {}
    for name, mat in sig.items():
        kw[name] = ModeOperator(mat, "signal", name)
        kw[name + "_j"] = ModeOperator(embed_signal(mat, space), "joint", name)
    for name, mat in pum.items():
        kw[name] = ModeOperator(mat, "pump", name)
        kw[name + "_j"] = ModeOperator(embed_pump(mat, space), "joint", name)
    return OperatorSet(space=space, **kw)
