import numpy as np
import pytest

from opaqnd.params import (
    BogoliubovDomainError,
    SystemParams,
    bogoliubov_params,
    params_from_targets,
)


def test_no_mismatch_squeezing_at_r_zero():
    Delta, u, g_eff = bogoliubov_params(7.5, 0.0)
    assert (Delta, u, g_eff) == (7.5, 0.0, 0.0)


def test_reference_point_150():
    # delta = 150 sqrt(2), r = 150 gives Delta = 150, sinh(2u) = 1
    Delta, u, g_eff = bogoliubov_params(212.13203435596427, 150.0)
    assert Delta == pytest.approx(150.0, abs=1e-9)
    assert u == pytest.approx(0.44068679350977147, abs=1e-12)
    assert g_eff == pytest.approx(1.0, abs=1e-12)


def test_coupling_diverges_toward_threshold():
    g_effs = [bogoliubov_params(1.0, r)[2] for r in (0.9, 0.99, 0.999)]
    us = [bogoliubov_params(1.0, r)[1] for r in (0.9, 0.99, 0.999)]
    assert g_effs == sorted(g_effs) and g_effs[-1] > 20
    assert us == sorted(us)


def test_domain_error():
    with pytest.raises(BogoliubovDomainError):
        bogoliubov_params(1.0, 1.0)
    with pytest.raises(BogoliubovDomainError):
        bogoliubov_params(1.0, 2.0)
    with pytest.raises(BogoliubovDomainError):
        bogoliubov_params(1.0, -0.1)


@pytest.mark.parametrize(
    "Delta,g_eff,delta_expect,r_expect",
    [
        (150.0, 1.0, 212.13203435596427, 150.0),
        (100.0, 1.5, 180.27756377319946, 150.0),
        (42.0, 0.0, 42.0, 0.0),
    ],
)
def test_targets_reference_values(Delta, g_eff, delta_expect, r_expect):
    delta, r = params_from_targets(Delta, g_eff)
    assert delta == pytest.approx(delta_expect, rel=1e-12)
    assert r == pytest.approx(r_expect, rel=1e-12, abs=1e-12)


def test_targets_roundtrip():
    for Delta, g_eff in [(150.0, 1.0), (100.0, 1.5), (30.0, 0.2), (10.0, 4.0)]:
        delta, r = params_from_targets(Delta, g_eff)
        D2, _, G2 = bogoliubov_params(delta, r)
        assert D2 == pytest.approx(Delta, rel=1e-10)
        assert G2 == pytest.approx(g_eff, rel=1e-10, abs=1e-12)


def test_system_params_consistency():
    p = SystemParams.from_targets(150.0, 1.0, kappa_a=0.03, kappa_b=3.0)
    assert p.r == pytest.approx(2 * p.g * p.beta, rel=1e-15)
    assert p.Delta == pytest.approx(np.sqrt(p.delta**2 - p.r**2), rel=1e-12)
    assert p.u == pytest.approx(0.5 * np.arctanh(p.r / p.delta), rel=1e-12)
    assert p.g_eff == pytest.approx(p.g * np.sinh(2 * p.u), rel=1e-12)


def test_system_params_validation():
    with pytest.raises(ValueError):
        SystemParams(delta=1.0, beta=-0.5)
    with pytest.raises(ValueError):
        SystemParams(delta=1.0, beta=0.0, kappa_a=-1.0)
