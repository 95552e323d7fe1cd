import numpy as np
import pytest

from opaqnd.hamiltonians import (
    build_H_bogoliubov_form,
    build_H_displaced,
    build_H_eff,
    build_H_lab,
    build_H_nonlinear,
    build_H_quadratic,
    counter_rotating_residual,
    displaced_frame_identity_defect,
)
from opaqnd.operators import (
    bogoliubov_number,
    commutator,
    embed_pump,
    embed_signal,
    number,
    position,
)
from opaqnd.params import BogoliubovDomainError, SystemParams
from opaqnd.spaces import ModeSpace
from opaqnd.states import fock_state, squeeze_matrix
from opaqnd.metrics import expectation

FIG1 = SystemParams.from_targets(150.0, 1.0)


def test_lab_hamiltonian_is_diagonal_without_coupling():
    p = SystemParams(delta=2.5, beta=0.0, g=0.0)
    sp = ModeSpace(4, 3)
    H = build_H_lab(p, sp).matrix
    expect = 2.5 * embed_signal(number(4), sp)
    assert np.allclose(H, expect)


def test_lab_pair_conversion_matrix_element():
    sp = ModeSpace(5, 4)
    H = build_H_lab(FIG1, sp).matrix
    bra = np.kron(fock_state(5, 0), fock_state(4, 1))
    ket = np.kron(fock_state(5, 2), fock_state(4, 0))
    assert np.vdot(bra, H @ ket) == pytest.approx(FIG1.g * np.sqrt(2), rel=1e-14)


def test_hamiltonians_hermitian():
    sp = ModeSpace(8, 6)
    for build in (build_H_lab, build_H_displaced, build_H_eff, build_H_bogoliubov_form):
        H = build(FIG1, sp).matrix
        assert np.max(np.abs(H - H.conj().T)) < 1e-12


def test_displaced_equals_lab_at_beta_zero():
    p = SystemParams(delta=2.0, beta=0.0)
    sp = ModeSpace(5, 5)
    assert np.allclose(build_H_displaced(p, sp).matrix, build_H_lab(p, sp).matrix)


def test_displaced_frame_identity():
    p = SystemParams(delta=3.0, beta=1.0)
    assert displaced_frame_identity_defect(p, ModeSpace(8, 40), pump_margin=20) < 1e-6


def test_quadratic_drive_scales_with_beta():
    sp = ModeSpace(6, 3)
    base = 3.0 * embed_signal(number(6), sp)
    h1 = build_H_quadratic(SystemParams(delta=3.0, beta=0.5), sp).matrix - base
    h2 = build_H_quadratic(SystemParams(delta=3.0, beta=1.0), sp).matrix - base
    assert np.allclose(2.0 * h1, h2, atol=1e-13)


def test_effective_commutes_with_number_and_pump_position():
    sp = ModeSpace(10, 8)
    H = build_H_eff(FIG1, sp).matrix
    nA = embed_signal(bogoliubov_number(10, FIG1.u), sp)
    xb = embed_pump(position(8), sp)
    assert np.max(np.abs(commutator(H, nA))) < 1e-10
    assert np.max(np.abs(commutator(H, xb))) < 1e-10


def test_effective_reduces_to_detuning_term_at_zero_coupling():
    p = SystemParams(delta=5.0, beta=0.0)
    sp = ModeSpace(6, 4)
    H = build_H_eff(p, sp).matrix
    assert np.allclose(H, 5.0 * embed_signal(number(6), sp), atol=1e-12)


def test_effective_requires_bogoliubov_domain():
    with pytest.raises(BogoliubovDomainError):
        build_H_eff(SystemParams(delta=1.0, beta=0.5), ModeSpace(4, 4))


def test_bogoliubov_form_equals_nonlinear_term():
    sp = ModeSpace(25, 8)
    h_nl = build_H_nonlinear(FIG1, sp).matrix
    h_bog = build_H_bogoliubov_form(FIG1, sp).matrix
    assert np.linalg.norm(h_nl - h_bog) / np.linalg.norm(h_nl) < 1e-12


def test_bogoliubov_form_no_dispersive_term_at_u_zero():
    p = SystemParams(delta=4.0, beta=0.0)
    sp = ModeSpace(8, 5)
    assert np.allclose(
        build_H_bogoliubov_form(p, sp).matrix, build_H_nonlinear(p, sp).matrix, atol=1e-13
    )


def test_counter_rotating_residual_block_structure():
    # in the squeezed-number basis the residual couples only levels N, N+-2
    ns = 60
    sp = ModeSpace(ns, 6)
    res = counter_rotating_residual(FIG1, sp).matrix
    S = squeeze_matrix(ns, FIG1.u)
    Sj = embed_signal(S, sp)
    res_bog = Sj.conj().T @ res @ Sj
    blocks = res_bog.reshape(ns, 6, ns, 6)
    interior = 10  # away from the squeeze-corrupted top levels
    for m in range(interior):
        for n in range(interior):
            if abs(m - n) != 2:
                assert np.max(np.abs(blocks[m, :, n, :])) < 1e-8, (m, n)
    assert np.max(np.abs(blocks[3, :, 5, :])) > 0.1  # the allowed coupling is present


def test_residual_is_nonlinear_minus_dispersive_part():
    sp = ModeSpace(12, 5)
    h_nl = build_H_nonlinear(FIG1, sp).matrix
    nA = bogoliubov_number(12, FIG1.u)
    dispersive = -2.0 * FIG1.g_eff * np.kron(nA + 0.5 * np.eye(12), position(5))
    res = counter_rotating_residual(FIG1, sp).matrix
    # NL = dispersive + residual, with the +1/2 symmetrized on the truncated space
    diff = h_nl - dispersive - res
    interior = np.ix_(range(10 * 5), range(10 * 5))
    assert np.max(np.abs(diff[interior])) < 1e-10
