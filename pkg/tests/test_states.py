import numpy as np
import pytest

from opaqnd.metrics import variance
from opaqnd.operators import bogoliubov_destroy, bogoliubov_number, momentum, position
from opaqnd.spaces import ModeSpace, TruncationError, top_level_population
from opaqnd.states import (
    DensityMatrix,
    bogoliubov_coherent_state,
    coherent_state,
    displacement_matrix,
    eigen_residual,
    fock_state,
    product_state,
    squeeze_matrix,
    squeezed_number_state,
    squeezed_number_residual,
    squeezed_vacuum_pump,
    vacuum_state,
)


def test_factories_normalized():
    for psi in (
        coherent_state(30, 0.7),
        squeezed_number_state(40, 0.4407, 2),
        bogoliubov_coherent_state(40, 0.3, 1.2),
        squeezed_vacuum_pump(40, 0.25),
    ):
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-10)


def test_displacement_and_squeeze_are_unitary():
    D = displacement_matrix(25, 0.8 - 0.3j)
    S = squeeze_matrix(25, -0.7)
    for U in (D, S):
        assert np.allclose(U @ U.conj().T, np.eye(25), atol=1e-12)


def test_coherent_displaces_quadratures():
    alpha = 0.6 + 0.4j
    psi = coherent_state(40, alpha)
    x, p = position(40), momentum(40)
    assert np.vdot(psi, x @ psi).real == pytest.approx(alpha.real, abs=1e-9)
    assert np.vdot(psi, p @ psi).real == pytest.approx(alpha.imag, abs=1e-9)


def test_squeezed_number_state_is_fock_at_u_zero():
    assert np.allclose(squeezed_number_state(20, 0.0, 2), fock_state(20, 2))


@pytest.mark.parametrize("N", [0, 1, 2, 3])
def test_squeezed_number_eigenrelation(N):
    # eigen-relation pins the squeeze phase convention
    assert squeezed_number_residual(60, 0.4407, N) < 1e-6


def test_squeezed_vacuum_variances():
    u = 0.4407
    psi = squeezed_number_state(50, u, 0)
    vx = variance(position(50), psi)
    vp = variance(momentum(50), psi)
    assert vx * vp == pytest.approx(1.0 / 16.0, rel=1e-8)
    assert vx == pytest.approx(np.exp(-2 * u) / 4, rel=1e-8)


def test_bogoliubov_coherent_eigenrelation():
    u, A = 0.4407, 3.172665
    psi = bogoliubov_coherent_state(60, u, A)
    assert eigen_residual(bogoliubov_destroy(60, u), psi, A) < 1e-6


def test_bogoliubov_coherent_reduces_to_coherent():
    assert np.allclose(bogoliubov_coherent_state(30, 0.0, 0.7), coherent_state(30, 0.7), atol=1e-12)


def test_bogoliubov_coherent_zero_amplitude_is_squeezed_vacuum():
    u = 0.35
    assert np.allclose(
        bogoliubov_coherent_state(30, u, 0.0), squeezed_number_state(30, u, 0), atol=1e-12
    )


@pytest.mark.parametrize(
    "w,expect_db",
    [(0.5, 0.0), (0.25, 6.0206), (0.0889, 15.0007)],
)
def test_pump_width(w, expect_db):
    dim = 50 if w >= 0.25 else 380
    psi = squeezed_vacuum_pump(dim, w, check=False)
    std = np.sqrt(variance(momentum(dim), psi))
    assert std == pytest.approx(w, abs=1e-6)
    assert -20 * np.log10(std / 0.5) == pytest.approx(expect_db, abs=1e-3)


def test_truncation_health_raises():
    with pytest.raises(TruncationError):
        coherent_state(6, 2.0)  # far too small a truncation
    # and passes for a healthy case
    coherent_state(40, 2.0)


def test_top_level_population_joint():
    space = ModeSpace(3, 4)
    st = product_state(fock_state(3, 2), fock_state(4, 0), space)
    assert top_level_population(st.amplitudes, space) == pytest.approx(1.0)


def test_two_mode_state_shape_guard():
    space = ModeSpace(3, 4)
    with pytest.raises(ValueError):
        product_state(fock_state(4, 0), fock_state(4, 0), space)


def test_density_matrix_checks():
    space = ModeSpace(2, 2)
    st = product_state(fock_state(2, 1), fock_state(2, 0), space)
    rho = DensityMatrix.from_state(st)
    rho.check()
    bad = DensityMatrix(rho.matrix * 0.5, space)
    with pytest.raises(ValueError):
        bad.check()
