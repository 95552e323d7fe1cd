"""Time evolution: unitary, dissipative, and continuously monitored.

The Hamiltonians here are time-independent, so unitary evolution goes
through a cached Hermitian eigendecomposition (an exact matrix
exponential); the master equation uses fixed-step fourth-order
integration with an optional step-halving accuracy check; the diffusive
stochastic master equation uses Euler-Maruyama with per-step trace
renormalization.  Monitoring conventions: a monitored channel L with
homodyne angle theta produces the innovation operator c = exp(-i theta) L,
the measured observable is c + c^dag, and theta = pi/2 reads out the p
quadrature of the monitored mode.  Detection efficiency is fixed at 1.
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import ModeOperator, as_matrix


@dataclass(frozen=True)
class LindbladChannel:
    """A collapse operator with the loss rate absorbed (L = sqrt(kappa) O).

    `monitored` marks the channel whose output is homodyned; `theta` is
    the homodyne angle (meaningful only if monitored).
    """

    operator: np.ndarray
    monitored: bool = False
    theta: float = 0.0

    def matrix(self):
        return as_matrix(self.operator)


@dataclass
class TrajectoryRecord:
    """Time series of one conditional evolution."""

    times: np.ndarray
    expectations: dict
    current: np.ndarray
    seed: object
    dt: float

    def __post_init__(self):
        n = len(self.times)
        for key, series in self.expectations.items():
            if len(series) != n:
                raise ValueError(f"series {key} length mismatch")
        if len(self.current) != n:
            raise ValueError("current length mismatch")


class UnitaryPropagator:
    """exp(-i H t) applied through the eigendecomposition of Hermitian H."""

    def __init__(self, H):
        H = as_matrix(H)
        herm_defect = np.max(np.abs(H - H.conj().T))
        if herm_defect > 1e-10 * max(1.0, np.max(np.abs(H))):
            raise ValueError(f"Hamiltonian not Hermitian (defect {herm_defect:.2e})")
        self.evals, self.evecs = np.linalg.eigh(H)

    def evolve(self, psi, t):
        psi = np.asarray(psi, dtype=complex)
        phases = np.exp(-1j * self.evals * t)
        return self.evecs @ (phases * (self.evecs.conj().T @ psi))

    def matrix(self, t):
        phases = np.exp(-1j * self.evals * t)
        return (self.evecs * phases) @ self.evecs.conj().T


def evolve_unitary(H, psi, t, steps=1, propagator=None):
    """Evolve a pure state under Hermitian H for time t.

    With steps > 1 returns the list of intermediate states at the step
    boundaries (including the final one).  Pass a prebuilt
    UnitaryPropagator to amortize the eigendecomposition across calls.
    """
    prop = propagator or UnitaryPropagator(H)
    if steps == 1:
        return prop.evolve(psi, t)
    out = []
    cur = np.asarray(psi, dtype=complex)
    for _ in range(steps):
        cur = prop.evolve(cur, t / steps)
        out.append(cur)
    return out


def lindblad_rhs(H, channel_mats, rho):
    """Right-hand side of the master equation for dense operators."""
    out = -1j * (H @ rho - rho @ H)
    for L in channel_mats:
        Ld = L.conj().T
        LdL = Ld @ L
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def evolve_master(H, channels, rho, t, dt, check_positivity=True, check_convergence=False):
    """Integrate the master equation with fixed-step RK4.

    `channels` is a sequence of LindbladChannel (or bare matrices).  The
    step must resolve both the Hamiltonian spectral range and the loss
    rates.  With check_convergence=True the integration is repeated at
    dt/2 and the results compared (relative Frobenius difference < 1e-8
    required).
    """
    H = as_matrix(H)
    mats = [c.matrix() if isinstance(c, LindbladChannel) else as_matrix(c) for c in channels]

    def run(step):
        n = max(1, int(round(t / step)))
        h = t / n
        r = np.array(rho, dtype=complex)
        for _ in range(n):
            k1 = lindblad_rhs(H, mats, r)
            k2 = lindblad_rhs(H, mats, r + 0.5 * h * k1)
            k3 = lindblad_rhs(H, mats, r + 0.5 * h * k2)
            k4 = lindblad_rhs(H, mats, r + h * k3)
            r = r + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return r

    out = run(dt)
    if check_convergence:
        ref = run(dt / 2)
        rel = np.linalg.norm(out - ref) / max(np.linalg.norm(ref), 1e-300)
        if rel > 1e-8:
            raise RuntimeError(f"master-equation step not converged (rel change {rel:.2e})")
        out = ref
    tr = np.trace(out).real
    if abs(tr - np.trace(rho).real) > 1e-6:
        raise RuntimeError(f"trace drift {tr - np.trace(rho).real:.2e}; reduce dt")
    if check_positivity:
        evals = np.linalg.eigvalsh((out + out.conj().T) / 2)
        if evals.min() < -1e-6:
            raise RuntimeError(f"positivity violated ({evals.min():.2e}); reduce dt")
    return out


def evolve_sme_homodyne(
    H,
    channels,
    rho0,
    t,
    dt,
    seed,
    observables=None,
    record_every=1,
    noise=None,
):
    """One diffusive homodyne trajectory (Euler-Maruyama, efficiency 1).

    Exactly one channel must be monitored; its innovation enters as
      drho = [Lindblad](rho) dt + (c rho + rho c^dag - <c + c^dag> rho) dW
    with c = exp(-i theta) L.  The state is renormalized after every step.
    The homodyne record is accumulated per recording interval as the
    average of dy = <c + c^dag> dt + dW over the interval.

    Returns a TrajectoryRecord; `observables` maps names to matrices.
    """
    H = as_matrix(H)
    monitored = [c for c in channels if isinstance(c, LindbladChannel) and c.monitored]
    if len(monitored) != 1:
        raise ValueError("exactly one monitored channel required")
    mats = [c.matrix() if isinstance(c, LindbladChannel) else as_matrix(c) for c in channels]
    c_op = np.exp(-1j * monitored[0].theta) * monitored[0].matrix()
    observables = observables or {}
    obs_mats = {k: as_matrix(v) for k, v in observables.items()}

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    n_steps = max(1, int(round(t / dt)))
    h = t / n_steps
    sqrt_h = np.sqrt(h)
    if noise is not None and len(noise) != n_steps:
        raise ValueError("noise array must provide one increment per step")
    n_rec = n_steps // record_every
    times = np.zeros(n_rec + 1)
    series = {k: np.zeros(n_rec + 1) for k in obs_mats}
    current = np.zeros(n_rec + 1)

    rho = np.array(rho0, dtype=complex)
    rho /= np.trace(rho).real

    def record(slot, time, block_dy, block_len):
        times[slot] = time
        for k, m in obs_mats.items():
            series[k][slot] = np.real(np.trace(m @ rho))
        current[slot] = block_dy / (block_len * h) if block_len else 0.0

    record(0, 0.0, 0.0, 0)
    slot = 1
    block_dy = 0.0
    for step in range(1, n_steps + 1):
        dW = rng.normal(0.0, sqrt_h) if noise is None else noise[step - 1]
        drift = lindblad_rhs(H, mats, rho)
        t1 = c_op @ rho
        meas = t1 + t1.conj().T
        m = np.real(np.trace(meas))
        rho = rho + h * drift + dW * (meas - m * rho)
        tr = np.real(np.trace(rho))
        if not np.isfinite(tr) or tr <= 0:
            raise RuntimeError("stochastic step diverged; reduce dt")
        rho /= tr
        if step % 100 == 0:
            rho = 0.5 * (rho + rho.conj().T)
        block_dy += m * h + dW
        if step % record_every == 0 and slot <= n_rec:
            record(slot, step * h, block_dy, record_every)
            block_dy = 0.0
            slot += 1
    return TrajectoryRecord(
        times=times, expectations=series, current=current, seed=seed, dt=h
    ), rho


def liouvillian_matrix(H, channels):
    """Dense superoperator of the master equation on row-major vec(rho).

    vec(A rho B) = (A kron B^T) vec(rho).  Intended for small spaces
    (dimension^2 storage); used by structural identity tests.
    """
    H = as_matrix(H)
    d = H.shape[0]
    eye = np.eye(d, dtype=complex)
    sup = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for ch in channels:
        L = ch.matrix() if isinstance(ch, LindbladChannel) else as_matrix(ch)
        LdL = L.conj().T @ L
        sup += np.kron(L, L.conj())
        sup -= 0.5 * (np.kron(LdL, eye) + np.kron(eye, LdL.T))
    return sup


def compare_exact_vs_rwa(params, space, psi0, t, n_checkpoints=1):
    """Fidelity between displaced-frame and dispersive-form evolutions.

    Evolves `psi0` under both Hamiltonians and reports the fidelity at
    n_checkpoints evenly spaced times (global phases drop out).
    """
    from .hamiltonians import build_H_displaced, build_H_eff
    from .metrics import fidelity

    prop_exact = UnitaryPropagator(build_H_displaced(params, space).matrix)
    prop_rwa = UnitaryPropagator(build_H_eff(params, space).matrix)
    times = [t * (k + 1) / n_checkpoints for k in range(n_checkpoints)]
    fids = [
        fidelity(prop_exact.evolve(psi0, tk), prop_rwa.evolve(psi0, tk)) for tk in times
    ]
    return {"times": np.array(times), "fidelities": np.array(fids), "final": fids[-1]}
