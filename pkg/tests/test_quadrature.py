import numpy as np
import pytest

from opaqnd.quadrature import (
    hermite_functions,
    momentum_amplitudes,
    momentum_wavefunction,
    position_amplitudes,
    quadrature_wavefunction,
    uniform_grid,
)
from opaqnd.states import coherent_state, squeezed_vacuum_pump


def test_vacuum_wavefunction_gaussian():
    ps = np.linspace(-3, 3, 7)
    expect = (2 / np.pi) ** 0.25 * np.exp(-(ps**2))
    assert np.allclose(quadrature_wavefunction(0, ps), expect, atol=1e-14)


def test_first_level_odd_with_node():
    xs = np.linspace(-2, 2, 9)
    vals = quadrature_wavefunction(1, xs)
    assert vals[4] == 0.0
    assert np.allclose(vals, -vals[::-1], atol=1e-14)


def test_grid_orthonormality():
    qs = uniform_grid(-6, 6, 0.01)
    basis = hermite_functions(10, qs)
    gram = basis @ basis.T * 0.01
    assert np.max(np.abs(gram - np.eye(11))) < 1e-6


def test_momentum_phase_convention():
    # <p|n> = (-i)^n psi_n(p)
    ps = np.linspace(-2, 2, 5)
    assert np.allclose(momentum_wavefunction(3, ps), (-1j) ** 3 * quadrature_wavefunction(3, ps))


def test_coherent_position_density():
    xs = uniform_grid(-5, 5, 0.01)
    psi = position_amplitudes(coherent_state(40, 0.7), xs)
    dens = np.abs(psi) ** 2
    # Gaussian centred at 0.7 with vacuum width 1/2
    assert np.sum(dens) * 0.01 == pytest.approx(1.0, abs=1e-8)
    assert xs[np.argmax(dens)] == pytest.approx(0.7, abs=0.011)
    mean = np.sum(xs * dens) * 0.01
    var = np.sum((xs - mean) ** 2 * dens) * 0.01
    assert var == pytest.approx(0.25, abs=1e-6)


def test_squeezed_pump_momentum_density_width():
    w = 0.25
    ps = uniform_grid(-3, 3, 0.005)
    phi = momentum_amplitudes(squeezed_vacuum_pump(50, w), ps)
    dens = np.abs(phi) ** 2
    var = np.sum(ps**2 * dens) * 0.005
    assert np.sqrt(var) == pytest.approx(w, abs=1e-6)
    # squeezed vacuum momentum wavefunction is real up to a global phase
    ang = np.angle(phi[np.argmax(dens)])
    assert np.max(np.abs(np.imag(phi * np.exp(-1j * ang)))) < 1e-10


def test_rejects_negative_index():
    with pytest.raises(ValueError):
        quadrature_wavefunction(-1, 0.0)
