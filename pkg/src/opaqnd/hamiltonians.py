"""Hamiltonians of the two-mode quadratic interaction.

Four builds of the same physics at different levels of description:

  * lab frame:        H = g (a^dag^2 b + a^2 b^dag) + delta a^dag a
  * displaced frame:  H_D = H_NL + H_Q, obtained from the lab frame by
    displacing the pump by beta; H_Q picks up the quadratic signal drive
    (r/2)(a^dag^2 + a^2) with r = 2 g beta.
  * squeezed-basis form: H_NL rewritten through A = a cosh u + a^dag sinh u,
    which exposes the dispersive coupling and the counter-rotating remainder.
  * effective (dispersive) form: after averaging out the counter-rotating
    terms, H_eff = -2 g_eff (N_A + 1/2) x_b + Delta N_A.

Global constants (the "+const" pieces) contribute only a global phase and
are dropped everywhere; fidelities never see them.
"""

import numpy as np

from .operators import (
    ModeOperator,
    bogoliubov_destroy,
    create,
    destroy,
    embed_pump,
    embed_signal,
    identity,
    number,
    position,
)
from .params import SystemParams
from .spaces import ModeSpace


def build_H_nonlinear(params: SystemParams, space: ModeSpace) -> ModeOperator:
    """Cubic two-mode term g (a^dag^2 b + a^2 b^dag)."""
    a2 = destroy(space.n_signal) @ destroy(space.n_signal)
    b = destroy(space.n_pump)
    h = params.g * (
        np.kron(a2.conj().T, b) + np.kron(a2, b.conj().T)
    )
    return ModeOperator(h, "joint", "H_NL")


def build_H_quadratic(params: SystemParams, space: ModeSpace) -> ModeOperator:
    """Quadratic signal part delta a^dag a + (r/2)(a^dag^2 + a^2), embedded."""
    ns = space.n_signal
    a2 = destroy(ns) @ destroy(ns)
    h_sig = params.delta * number(ns) + 0.5 * params.r * (a2 + a2.conj().T)
    return ModeOperator(embed_signal(h_sig, space), "joint", "H_Q")


def build_H_lab(params: SystemParams, space: ModeSpace) -> ModeOperator:
    """Lab-frame Hamiltonian g (a^dag^2 b + a^2 b^dag) + delta a^dag a."""
    h = build_H_nonlinear(params, space).matrix + params.delta * embed_signal(
        number(space.n_signal), space
    )
    return ModeOperator(h, "joint", "H_lab")


def build_H_displaced(params: SystemParams, space: ModeSpace) -> ModeOperator:
    """Displaced-frame Hamiltonian H_NL + H_Q."""
    h = build_H_nonlinear(params, space).matrix + build_H_quadratic(params, space).matrix
    return ModeOperator(h, "joint", "H_displaced")


def build_H_eff(params: SystemParams, space: ModeSpace) -> ModeOperator:
    """Dispersive form -2 g_eff (N_A + 1/2) x_b + Delta N_A.

    Commutes with both N_A and x_b as matrices, so the squeezed-basis
    excitation number is a conserved readout quantity.
    """
    Delta, u, g_eff = params.Delta, params.u, params.g_eff
    nA = bogoliubov_destroy(space.n_signal, u)
    nA = nA.conj().T @ nA
    h = -2.0 * g_eff * np.kron(
        nA + 0.5 * identity(space.n_signal), position(space.n_pump)
    ) + Delta * embed_signal(nA, space)
    return ModeOperator(h, "joint", "H_eff")


def build_H_bogoliubov_form(params: SystemParams, space: ModeSpace) -> ModeOperator:
    """H_NL written through the squeezed-basis ladder operators.

    g { cosh^2(u) A^dag^2 + sinh^2(u) A^2 - sinh(2u) (A^dag A + A A^dag)/2 } b + h.c.

    The symmetric ordering keeps the identity with build_H_nonlinear exact
    on the truncated space (the textbook "+1/2" holds where [A, A^dag] = 1,
    i.e. everywhere except the top truncation level).
    """
    u = params.u
    A = bogoliubov_destroy(space.n_signal, u)
    Ad = A.conj().T
    sig = (
        np.cosh(u) ** 2 * (Ad @ Ad)
        + np.sinh(u) ** 2 * (A @ A)
        - 0.5 * np.sinh(2 * u) * (Ad @ A + A @ Ad)
    )
    b = destroy(space.n_pump)
    h = params.g * (np.kron(sig, b) + np.kron(sig.conj().T, b.conj().T))
    return ModeOperator(h, "joint", "H_NL_bogoliubov")


def counter_rotating_residual(params: SystemParams, space: ModeSpace) -> ModeOperator:
    """The part of H_NL dropped by the dispersive approximation.

    Equals g (cosh^2 u A^dag^2 + sinh^2 u A^2) b + h.c.; in the
    squeezed-number basis it couples only blocks whose excitation number
    differs by 2.
    """
    u = params.u
    A = bogoliubov_destroy(space.n_signal, u)
    Ad = A.conj().T
    sig = np.cosh(u) ** 2 * (Ad @ Ad) + np.sinh(u) ** 2 * (A @ A)
    b = destroy(space.n_pump)
    h = params.g * (np.kron(sig, b) + np.kron(sig.conj().T, b.conj().T))
    return ModeOperator(h, "joint", "H_counter_rotating")


def displaced_frame_identity_defect(params: SystemParams, space: ModeSpace, pump_margin=12):
    """Relative defect of H_D = D_b(beta)^dag H_lab D_b(beta) + const.

    The displacement operator is exact only away from the pump truncation
    boundary, so the comparison is restricted to pump levels below
    n_pump - pump_margin; the constant is fitted on that block.  Returns
    the relative Frobenius defect, which certifies the frame shift on the
    faithfully represented subspace.
    """
    from scipy.linalg import expm

    b = destroy(space.n_pump)
    D = embed_pump(expm(params.beta * b.conj().T - params.beta * b), space)
    h_lab = build_H_lab(params, space).matrix
    h_disp = build_H_displaced(params, space).matrix
    shifted = D.conj().T @ h_lab @ D
    keep = space.n_pump - pump_margin
    if keep < 2:
        raise ValueError("pump truncation too small for the requested margin")
    mask = (np.arange(space.dim) % space.n_pump) < keep
    diff = (h_disp - shifted)[np.ix_(mask, mask)]
    ref = h_disp[np.ix_(mask, mask)]
    c = np.trace(diff) / diff.shape[0]
    defect = np.linalg.norm(diff - c * np.eye(diff.shape[0]))
    return float(defect / np.linalg.norm(ref))
