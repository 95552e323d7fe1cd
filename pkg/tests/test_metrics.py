import numpy as np
import pytest

from opaqnd.metrics import (
    expectation,
    fidelity,
    partial_trace,
    purity,
    trace_distance,
    variance,
)
from opaqnd.operators import number
from opaqnd.spaces import ModeSpace
from opaqnd.states import (
    DensityMatrix,
    coherent_state,
    fock_state,
    product_state,
    vacuum_state,
)


def test_fidelity_pure_pure():
    assert fidelity(fock_state(5, 0), fock_state(5, 1)) == 0.0
    assert fidelity(fock_state(5, 2), fock_state(5, 2)) == pytest.approx(1.0)


def test_fidelity_pure_mixed_consistency():
    psi = coherent_state(20, 0.5)
    rho = np.outer(psi, psi.conj())
    phi = fock_state(20, 0)
    assert fidelity(phi, rho) == pytest.approx(fidelity(phi, psi), rel=1e-12)


def test_fidelity_mixed_mixed_agrees_with_pure_formula():
    psi, phi = coherent_state(20, 0.4), fock_state(20, 1)
    rho = np.outer(psi, psi.conj())
    sig = np.outer(phi, phi.conj())
    assert fidelity(rho, sig) == pytest.approx(fidelity(psi, phi), abs=1e-7)


def test_purity_values():
    assert purity(fock_state(4, 2)) == 1.0
    mixed = 0.5 * np.eye(2, dtype=complex)
    assert purity(mixed) == pytest.approx(0.5)


def test_partial_trace_product_state():
    space = ModeSpace(4, 5)
    sig = coherent_state(4, 0.3, check=False)
    pump = fock_state(5, 1)
    st = product_state(sig, pump, space)
    rho_a = partial_trace(st, space, keep="signal")
    assert np.allclose(rho_a, np.outer(sig, sig.conj()), atol=1e-12)
    rho_b = partial_trace(DensityMatrix.from_state(st), space, keep="pump")
    assert np.allclose(rho_b, np.outer(pump, pump.conj()), atol=1e-12)
    assert np.trace(rho_b).real == pytest.approx(1.0)


def test_partial_trace_entangled_state_trace_preserved():
    space = ModeSpace(3, 3)
    psi = np.zeros(9, complex)
    psi[0] = psi[4] = 1 / np.sqrt(2)  # |00> + |11>
    rho_a = partial_trace(psi, space, keep="signal")
    assert np.trace(rho_a).real == pytest.approx(1.0)
    assert purity(rho_a) == pytest.approx(0.5)


def test_expectation_and_variance():
    psi = coherent_state(30, 1.1)
    n = number(30)
    assert expectation(n, psi).real == pytest.approx(1.1**2, rel=1e-8)
    assert variance(n, psi) == pytest.approx(1.1**2, rel=1e-6)  # Poisson


def test_trace_distance():
    r0 = np.outer(fock_state(3, 0), fock_state(3, 0))
    r1 = np.outer(fock_state(3, 1), fock_state(3, 1))
    assert trace_distance(r0, r1) == pytest.approx(1.0)
    assert trace_distance(r0, r0) == pytest.approx(0.0, abs=1e-14)
