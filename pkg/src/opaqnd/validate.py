"""Fast invariant suite behind the command-line `validate` experiment.

Each check re-derives a structural identity of the package at a small,
deterministic scale and returns (name, passed, detail).  The suite is the
smoke test a fresh installation should pass in well under a minute.
"""

import numpy as np

from . import conventions
from .evolve import LindbladChannel, UnitaryPropagator, liouvillian_matrix
from .hamiltonians import build_H_eff
from .metrics import expectation, variance
from .operators import (
    bogoliubov_destroy,
    bogoliubov_number,
    commutator,
    create,
    destroy,
    embed_pump,
    embed_signal,
    identity,
    momentum,
    number,
    position,
)
from .opo import build_opo_channels, lindblad_split_identity_defect
from .params import SystemParams
from .qnd import make_kraus_family
from .spaces import ModeSpace
from .states import (
    bogoliubov_coherent_state,
    coherent_state,
    product_state,
    squeezed_number_residual,
    squeezed_vacuum_pump,
    vacuum_state,
)


def _check_operator_algebra():
    n = 12
    dev = np.abs(create(n) @ destroy(n) - number(n)).max()
    comm = commutator(destroy(n), create(n)) - np.eye(n)
    comm[n - 1, n - 1] = 0.0
    return dev < 1e-12 and np.abs(comm).max() < 1e-12, f"defects {dev:.1e}"


def _check_bogoliubov_inversion():
    n, u = 15, 0.4407
    A = bogoliubov_destroy(n, u)
    dev = np.abs(np.cosh(u) * A - np.sinh(u) * A.conj().T - destroy(n)).max()
    return dev < 1e-12, f"defect {dev:.1e}"


def _check_factory_eigenrelations():
    worst = max(squeezed_number_residual(60, 0.4407, N) for N in range(4))
    return worst < 1e-6, f"worst residual {worst:.1e}"


def _check_db_rule():
    vals = (
        abs(conventions.squeezing_db(0.25) - 6.0206),
        abs(conventions.width_from_db(15.0) - 0.0889140),
    )
    return max(vals) < 1e-4, f"deviations {vals[0]:.1e}, {vals[1]:.1e}"


def _check_vacuum_variances():
    n = 12
    v = vacuum_state(n)
    dev = max(abs(variance(position(n), v) - 0.25), abs(variance(momentum(n), v) - 0.25))
    return dev < 1e-12, f"deviation {dev:.1e}"


def _check_heisenberg_displacement():
    from .states import squeezed_number_state

    params = SystemParams.from_targets(40.0, 1.0)
    sp = ModeSpace(30, 35)
    psi0 = product_state(
        squeezed_number_state(30, params.u, 1),
        squeezed_vacuum_pump(35, 0.25),
        sp,
    ).amplitudes
    psi = UnitaryPropagator(build_H_eff(params, sp).matrix).evolve(psi0, 1.0)
    pb = embed_pump(momentum(35), sp)
    na = embed_signal(bogoliubov_number(30, params.u), sp)
    dp = expectation(pb, psi).real - expectation(pb, psi0).real
    target = params.g_eff * 1.0 * (expectation(na, psi0).real + 0.5)
    return abs(dp - target) < 1e-6, f"dp deviation {abs(dp - target):.1e}"


def _check_povm_completeness():
    fam = make_kraus_family(30, 0.4407, 1.0, 0.25, n_max=6)
    defect = fam.completeness_defect()
    return defect < 1e-3, f"defect {defect:.1e}"


def _check_generator_beta_independence():
    sp = ModeSpace(3, 8)
    base = SystemParams.from_targets(10.0, 0.6, kappa_a=0.1, kappa_b=1.3)
    H = build_H_eff(base, sp).matrix

    def generator(beta):
        import dataclasses

        params = dataclasses.replace(base, beta=beta, lam=base.kappa_b * beta / 2.0)
        H_drive, L_a, L_b = build_opo_channels(params, sp)
        return liouvillian_matrix(
            H + H_drive.matrix, [LindbladChannel(L_a.matrix), LindbladChannel(L_b.matrix)]
        )

    ref = generator(0.0)
    worst = max(np.abs(generator(b) - ref).max() for b in (1.0, 2.0))
    return worst < 1e-8, f"worst deviation {worst:.1e}"


def _check_lindblad_split():
    defect = lindblad_split_identity_defect(0.4407, 0.8, 25)
    return defect < 1e-10, f"defect {defect:.1e}"


CHECKS = [
    ("operator-algebra", _check_operator_algebra),
    ("squeezed-basis-inversion", _check_bogoliubov_inversion),
    ("factory-eigenrelations", _check_factory_eigenrelations),
    ("squeezing-db-rule", _check_db_rule),
    ("vacuum-variances", _check_vacuum_variances),
    ("pump-displacement-law", _check_heisenberg_displacement),
    ("povm-completeness", _check_povm_completeness),
    ("drive-offset-cancellation", _check_generator_beta_independence),
    ("loss-channel-splitting", _check_lindblad_split),
]


def run_validation_suite(verbose=False):
    """Run every invariant check; returns a list of (name, passed, detail)."""
    results = []
    for name, fn in CHECKS:
        try:
            passed, detail = fn()
        except Exception as exc:  # surface, don't hide, broken checks
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, bool(passed), detail))
        if verbose:
            print(f"  {'PASS' if passed else 'FAIL'}  {name}  ({detail})")
    return results
