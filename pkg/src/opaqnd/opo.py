"""Driven-cavity physics: stationary states, loss-induced level jumps,
continuously monitored trajectories, and the experimental budget check.

The cavity configuration adds a pump drive i lam (b^dag - b) and the loss
channels L_a = sqrt(kappa_a) a, L_b = sqrt(kappa_b)(b + beta) to the
two-mode interaction.  With lam = kappa_b beta / 2 the displaced frame
with beta = 0, lam = 0 generates the identical master equation, so all
simulations run there.  Under the dispersive Hamiltonian each signal
level N pins the pump at the coherent amplitude
beta_N = 2i g_eff (N + 1/2) / kappa_b; signal photon loss moves N by +-1
(downward-biased), producing jumps between plateaus that a pump homodyne
record resolves.
"""

from dataclasses import dataclass, field

import numpy as np

from . import conventions
from ._sme_kernel import (
    HAVE_NUMBA,
    banded_to_dense,
    pack_bands,
    run_ensemble,
)
from .evolve import LindbladChannel, TrajectoryRecord, liouvillian_matrix
from .hamiltonians import build_H_eff
from .operators import destroy, embed_pump, embed_signal, identity, ModeOperator
from .params import SystemParams
from .spaces import ModeSpace
from .states import coherent_state, fock_state
from .metrics import trace_distance


def build_opo_channels(params: SystemParams, space: ModeSpace, displaced_frame=True):
    """Drive Hamiltonian and loss channels of the cavity configuration.

    In the displaced frame (default) the pump channel is
    sqrt(kappa_b)(b + beta) and the drive i lam (b^dag - b); in the lab
    frame the channel is plain sqrt(kappa_b) b.
    """
    b = destroy(space.n_pump)
    a_j = embed_signal(destroy(space.n_signal), space)
    beta = params.beta if displaced_frame else 0.0
    H_drive = 1j * params.lam * embed_pump(b.conj().T - b, space)
    L_b = np.sqrt(params.kappa_b) * embed_pump(b + beta * identity(space.n_pump), space)
    L_a = np.sqrt(params.kappa_a) * a_j
    return (
        ModeOperator(H_drive, "joint", "H_drive"),
        ModeOperator(L_a, "joint", "L_a"),
        ModeOperator(L_b, "joint", "L_b"),
    )


def stationary_pump_amplitude(N, params: SystemParams):
    """Pump amplitude locked to signal level N: 2i g_eff (N + 1/2) / kappa_b."""
    if params.kappa_b <= 0:
        raise ValueError("stationary amplitude needs a positive pump loss rate")
    return 2j * params.g_eff * (N + 0.5) / params.kappa_b


def verify_stationary_state(N, params: SystemParams, space: ModeSpace, amplitude=None):
    """Frobenius norm of the generator applied to |N> (x) |beta_N>.

    Valid claim only without signal loss (kappa_a = 0).  The state is pure,
    so the generator output has rank at most four and its norm follows
    from a small Gram matrix; the cost is a few matrix-vector products,
    which keeps the truncations needed by the deeply squeezed levels
    affordable.  Passing a wrong `amplitude` turns this into a negative
    control (the residual becomes order kappa_b |beta - beta_N|).
    """
    if params.kappa_a != 0:
        raise ValueError("stationarity holds only for kappa_a = 0")
    from .states import squeezed_number_state, product_state

    H = build_H_eff(params, space).matrix
    L = np.sqrt(params.kappa_b) * embed_pump(destroy(space.n_pump), space)
    sig = squeezed_number_state(space.n_signal, params.u, N, check=False)
    beta = amplitude if amplitude is not None else stationary_pump_amplitude(N, params)
    pump = coherent_state(space.n_pump, beta, check=False)
    psi = product_state(sig, pump, space).amplitudes
    # centre every operator on its expectation before forming the rank-4
    # update; otherwise the Gram sums cancel catastrophically at the
    # 1e-6 residual scale
    v_h = H @ psi
    v_h -= np.vdot(psi, v_h) * psi
    v_l = L @ psi
    lam = np.vdot(psi, v_l)
    v_l -= lam * psi
    v_g = L.conj().T @ (L @ psi)
    g = np.vdot(psi, v_g)
    v_g -= g * psi
    terms = [
        (-1j, v_h, psi),
        (1j, psi, v_h),
        (1.0, v_l, v_l),
        (np.conj(lam), v_l, psi),
        (lam, psi, v_l),
        (-0.5, v_g, psi),
        (-0.5, psi, v_g),
        (abs(lam) ** 2 - g, psi, psi),
    ]
    total = 0.0j
    for ak, a1, b1 in terms:
        for al, a2, b2 in terms:
            total += ak * np.conj(al) * np.vdot(a2, a1) * np.vdot(b1, b2)
    return float(np.sqrt(max(total.real, 0.0)))


def photon_subtraction_action(N, u):
    """Coefficients of a|N>: (cosh(u) sqrt(N), -sinh(u) sqrt(N+1)).

    Bare photon loss moves the squeezed-basis level both down and up, with
    the downward branch always dominating (cosh > sinh).
    """
    if N < 0:
        raise ValueError("level must be non-negative")
    return (np.cosh(u) * np.sqrt(N), -np.sinh(u) * np.sqrt(N + 1))


def rwa_lindblad_split(u, kappa_a, dim):
    """Dispersive-regime splitting of signal loss into level ladder channels.

    Returns (L_plus, L_minus) = (sqrt(kappa_a) sinh(u) A^dag,
    sqrt(kappa_a) cosh(u) A) as dense matrices on a `dim`-level signal
    space, written in the squeezed-level eigenbasis (A is the plain
    lowering matrix there).
    """
    A = destroy(dim)
    L_plus = np.sqrt(kappa_a) * np.sinh(u) * A.conj().T
    L_minus = np.sqrt(kappa_a) * np.cosh(u) * A
    return L_plus, L_minus


def lindblad_split_identity_defect(u, kappa_a, dim):
    """max |(L+^dag L+ + L-^dag L-) - kappa_a (cosh(2u) N + sinh(u)^2)|."""
    L_plus, L_minus = rwa_lindblad_split(u, kappa_a, dim)
    lhs = L_plus.conj().T @ L_plus + L_minus.conj().T @ L_minus
    n = np.arange(dim)
    rhs = np.diag(kappa_a * (np.cosh(2 * u) * n + np.sinh(u) ** 2)).astype(complex)
    # the raising channel feels the truncation at the top level
    return float(np.max(np.abs((lhs - rhs)[: dim - 1, : dim - 1])))


def no_jump_survival(N, u, kappa_a, t, dim=16):
    """Probability that level N has emitted nothing up to time t.

    Evaluated as <N| exp(-(L+^dag L+ + L-^dag L-) t) |N> with the channel
    matrices assembled numerically, the standard no-jump weight of the
    unraveled master equation.  Serves as the independent oracle for
    jump_probability (which evaluates the same quantity in closed form).
    """
    from scipy.linalg import expm

    L_plus, L_minus = rwa_lindblad_split(u, kappa_a, dim)
    Gsum = L_plus.conj().T @ L_plus + L_minus.conj().T @ L_minus
    vec = fock_state(dim, N)
    return float(np.real(np.vdot(vec, expm(-Gsum * t) @ vec)))


def jump_probability(u, kappa_a, t):
    """Probability that the level-1 state has suffered a jump by time t.

    P = 1 - exp(-kappa_a (3 cosh(u)^2 - 2) t); the exponent is the total
    outflow rate cosh(2u) + sinh(u)^2 evaluated at N = 1.
    """
    if t < 0:
        raise ValueError("time must be non-negative")
    return float(1.0 - np.exp(-kappa_a * (3.0 * np.cosh(u) ** 2 - 2.0) * t))


def pump_width_decay(w, kappa_b, t):
    """Probe width after pump loss: sqrt(w^2 e^{-kt} + (1 - e^{-kt})/4)."""
    if t < 0:
        raise ValueError("time must be non-negative")
    decay = np.exp(-kappa_b * t)
    return float(np.sqrt(w**2 * decay + (1.0 - decay) / 4.0))


@dataclass(frozen=True)
class FeasibilityReport:
    u: float
    w: float
    g_over_kappa_a: float
    t_jump: float
    pump_width_at_jump: float
    displacement_over_width: float
    headline_ratio: float  # (g/kappa_a) / w
    relaxation_factor: float  # w0 / w, the gain over the bare strong-coupling bar
    passes: bool


def feasibility_check(g, kappa_a, kappa_b, w, u):
    """Single-photon-regime budget: can one conditional displacement be
    resolved before a loss-induced jump?

    t_jump ~ 1/(cosh(u)^2 kappa_a) sets the usable interaction time; the
    conditional displacement accumulated over it, g_eff t_jump, must beat
    the (loss-broadened) probe width.  The headline requirement is
    (g / kappa_a) >= w, so probe squeezing relaxes the bare strong-coupling
    condition by w0/w.
    """
    if min(g, kappa_a, kappa_b) <= 0 or w <= 0:
        raise ValueError("rates and width must be positive")
    t_jump = 1.0 / (np.cosh(u) ** 2 * kappa_a)
    w_jump = pump_width_decay(w, kappa_b, t_jump)
    g_eff = g * np.sinh(2 * u) if u > 0 else g
    ratio = (g / kappa_a) / w
    return FeasibilityReport(
        u=u,
        w=w,
        g_over_kappa_a=g / kappa_a,
        t_jump=float(t_jump),
        pump_width_at_jump=float(w_jump),
        displacement_over_width=float(g_eff * t_jump / w_jump),
        headline_ratio=float(ratio),
        relaxation_factor=float(conventions.VACUUM_WIDTH / w),
        passes=bool(ratio >= 1.0),
    )


# ---------------------------------------------------------------------------
# monitored trajectories


@dataclass(frozen=True)
class OPOConfig:
    """Trajectory-ensemble configuration.

    The signal lives in the squeezed-level eigenbasis with `n_levels`
    levels (operators are exact there; truncation only limits how many
    level plateaus are representable).  lam = kappa_b beta / 2 is implied:
    simulations run in the displaced frame where drive and offset cancel.
    """

    params: SystemParams
    n_levels: int = 6
    n_pump: int = 36
    t_final: float = 100.0
    dt: float = 1e-3
    n_traj: int = 20
    base_seed: int = 2024
    record_every: int = 50
    initial_level: int = 1
    initial_pump: str = "stationary"  # or "vacuum"
    theta: float = np.pi / 2.0
    # Highest level the loss channel may raise into.  Rare upward
    # excursions beyond it are reflected rather than allowed to chase
    # pump displacements the truncation cannot hold; defaults to
    # n_levels - 2.  The modified channel stays completely positive.
    level_cap: int | None = None

    def effective_cap(self):
        cap = self.level_cap if self.level_cap is not None else self.n_levels - 2
        if not 0 < cap < self.n_levels:
            raise ValueError("level_cap must lie inside the retained levels")
        return cap


def _opo_bands(cfg: OPOConfig):
    """Banded operators of the monitored cavity in the product basis."""
    p = cfg.params
    nb, npu = cfg.n_levels, cfg.n_pump
    D = nb * npu
    u, g_eff, Delta = p.u, p.g_eff, p.Delta
    N_of = np.arange(D) // npu
    m_of = np.arange(D) % npu

    def band(offset, values):
        return np.array([offset], dtype=np.int64), values[None, :]

    # Hamiltonian: Delta N - 2 g_eff (N + 1/2) x_b
    h0 = (Delta * N_of).astype(complex)
    h_up = np.zeros(D, dtype=complex)
    sel = m_of < npu - 1
    h_up[sel] = -g_eff * (N_of[sel] + 0.5) * np.sqrt(m_of[sel] + 1.0)
    h_dn = np.zeros(D, dtype=complex)
    sel = m_of >= 1
    h_dn[sel] = -g_eff * (N_of[sel] + 0.5) * np.sqrt(m_of[sel].astype(float))

    cap = cfg.effective_cap()
    # L_a = sqrt(kappa_a) (cosh u A - sinh u A^dag), with the raising part
    # stopped at the level cap; the lowering part keeps its full reach
    la_up = np.zeros(D, dtype=complex)
    sel = N_of < nb - 1
    la_up[sel] = np.sqrt(p.kappa_a) * np.cosh(u) * np.sqrt(N_of[sel] + 1.0)
    la_dn = np.zeros(D, dtype=complex)
    sel = (N_of >= 1) & (N_of <= cap)
    la_dn[sel] = -np.sqrt(p.kappa_a) * np.sinh(u) * np.sqrt(N_of[sel].astype(float))
    La = (np.array([npu, -npu], dtype=np.int64), np.stack([la_up, la_dn]))

    # L_b = sqrt(kappa_b) b
    lb = np.zeros(D, dtype=complex)
    sel = m_of < npu - 1
    lb[sel] = np.sqrt(p.kappa_b) * np.sqrt(m_of[sel] + 1.0)
    Lb = (np.array([1], dtype=np.int64), lb[None, :])

    # G = (L_a^dag L_a + L_b^dag L_b)/2, assembled from the truncated
    # channel matrices themselves so the drift balances the jump refill
    # exactly (the raising part of L_a dies at the top retained level)
    raising_open = (N_of <= cap - 1).astype(float)
    g0 = (
        p.kappa_a * (np.cosh(u) ** 2 * N_of + np.sinh(u) ** 2 * (N_of + 1.0) * raising_open)
        + p.kappa_b * m_of
    ).astype(complex)
    k2 = np.zeros(D, dtype=complex)  # A^2 part of L_a^dag L_a
    sel = N_of <= cap - 1
    k2[sel] = -p.kappa_a * np.cosh(u) * np.sinh(u) * np.sqrt(
        (N_of[sel] + 1.0) * (N_of[sel] + 2.0)
    )
    k2d = np.zeros(D, dtype=complex)
    sel = (N_of >= 2) & (N_of <= cap + 1)
    k2d[sel] = -p.kappa_a * np.cosh(u) * np.sinh(u) * np.sqrt(
        N_of[sel] * (N_of[sel] - 1.0)
    )
    G = (
        np.array([0, 2 * npu, -2 * npu], dtype=np.int64),
        np.stack([0.5 * g0, 0.5 * k2, 0.5 * k2d]),
    )

    # observables: level number, pump p, signal x, signal x^2
    obs_n = band(0, N_of.astype(complex))
    pb_up = np.zeros(D, dtype=complex)
    sel = m_of < npu - 1
    pb_up[sel] = -0.5j * np.sqrt(m_of[sel] + 1.0)
    pb_dn = np.zeros(D, dtype=complex)
    sel = m_of >= 1
    pb_dn[sel] = 0.5j * np.sqrt(m_of[sel].astype(float))
    obs_pb = (np.array([1, -1], dtype=np.int64), np.stack([pb_up, pb_dn]))
    eu = np.exp(-u)
    xa_up = np.zeros(D, dtype=complex)
    sel = N_of < nb - 1
    xa_up[sel] = 0.5 * eu * np.sqrt(N_of[sel] + 1.0)
    xa_dn = np.zeros(D, dtype=complex)
    sel = N_of >= 1
    xa_dn[sel] = 0.5 * eu * np.sqrt(N_of[sel].astype(float))
    obs_xa = (np.array([npu, -npu], dtype=np.int64), np.stack([xa_up, xa_dn]))
    x2_0 = (eu**2 / 4.0) * (2.0 * N_of + 1.0) + 0.0j
    x2_up = np.zeros(D, dtype=complex)
    sel = N_of < nb - 2
    x2_up[sel] = (eu**2 / 4.0) * np.sqrt((N_of[sel] + 1.0) * (N_of[sel] + 2.0))
    x2_dn = np.zeros(D, dtype=complex)
    sel = N_of >= 2
    x2_dn[sel] = (eu**2 / 4.0) * np.sqrt(N_of[sel] * (N_of[sel] - 1.0))
    obs_x2 = (
        np.array([0, 2 * npu, -2 * npu], dtype=np.int64),
        np.stack([x2_0, x2_up, x2_dn]),
    )
    return {"H": (np.array([0, 1, -1], dtype=np.int64), np.stack([h0, h_up, h_dn])),
            "G": G, "La": La, "Lb": Lb,
            "obs": [obs_n, obs_pb, obs_xa, obs_x2]}


def _level_unitaries(cfg: OPOConfig):
    """Per-level pump propagators exp(-i H_N dt) of the dispersive form.

    H couples no signal levels, so its exact propagator factorizes into
    n_levels dense pump-space unitaries; the split-step integrator applies
    them every step.
    """
    p = cfg.params
    npu = cfg.n_pump
    from .operators import position as _position

    evals, evecs = np.linalg.eigh(_position(npu))
    U = np.zeros((cfg.n_levels, npu, npu), dtype=np.complex128)
    for N in range(cfg.n_levels):
        phases = np.exp(1j * 2.0 * p.g_eff * (N + 0.5) * evals * cfg.dt)
        U[N] = np.exp(-1j * p.Delta * N * cfg.dt) * (evecs * phases) @ evecs.conj().T
    Udag = np.ascontiguousarray(U.conj().transpose(0, 2, 1))
    return U, Udag


def trajectory_noise(cfg: OPOConfig):
    """Per-trajectory Wiener increments from counter-based streams.

    Trajectory i draws from Philox keyed by (base_seed, i); the zero row
    appended at the end drives the unconditioned reference evolution.
    """
    n_steps = int(round(cfg.t_final / cfg.dt))
    noise = np.zeros((cfg.n_traj + 1, n_steps))
    for i in range(cfg.n_traj):
        seq = np.random.SeedSequence(entropy=cfg.base_seed, spawn_key=(i,))
        rng = np.random.Generator(np.random.Philox(seq))
        noise[i] = rng.normal(0.0, np.sqrt(cfg.dt), n_steps)
    return noise


@dataclass
class PlateauSegment:
    start: float
    end: float
    mean_level: float
    mean_pump_p: float
    min_signal_db: float


@dataclass
class OPOTrajectorySet:
    config: OPOConfig
    times: np.ndarray
    records: list  # TrajectoryRecord per trajectory
    reference_record: TrajectoryRecord  # unconditioned evolution
    plateaus: list  # list of PlateauSegment lists, one per trajectory
    jumps: list  # list of jump-time arrays, one per trajectory
    mean_final_trace_distance: float
    stationary_levels: np.ndarray


def detect_plateaus(times, level_series, pump_series, db_series,
                    window=50, var_threshold=0.1, jump_size=0.5, trim=10):
    """Sliding-window plateau segmentation of a level time series.

    A sample belongs to a plateau when the variance of the `window`
    samples centred on it is below `var_threshold`; contiguous plateau
    samples form non-overlapping segments, segment statistics exclude
    `trim` samples at each edge (pump lag), and a jump is a transition
    between consecutive segments whose mean levels differ by at least
    `jump_size`.
    """
    n = len(level_series)
    if n < window + 1:
        return [], np.array([])
    kernel = np.ones(window) / window
    mean = np.convolve(level_series, kernel, mode="valid")
    mean2 = np.convolve(level_series**2, kernel, mode="valid")
    var = np.clip(mean2 - mean**2, 0.0, None)
    half = window // 2
    ok = np.zeros(n, dtype=bool)
    ok[half : half + var.size] = var < var_threshold  # centre labelling
    segments = []
    s = 0
    while s < n:
        if ok[s]:
            e = s
            while e + 1 < n and ok[e + 1]:
                e += 1
            lo, hi = s + trim, e + 1 - trim
            if hi <= lo:  # segment shorter than the trim margins
                lo, hi = s, e + 1
            core = slice(lo, hi)
            segments.append(
                PlateauSegment(
                    start=float(times[s]),
                    end=float(times[e]),
                    mean_level=float(np.mean(level_series[core])),
                    mean_pump_p=float(np.mean(pump_series[core])),
                    min_signal_db=float(np.min(db_series[core])),
                )
            )
            s = e + 1
        else:
            s += 1
    jump_times = []
    for a, b in zip(segments[:-1], segments[1:]):
        if abs(b.mean_level - a.mean_level) >= jump_size:
            jump_times.append(0.5 * (a.end + b.start))
    return segments, np.array(jump_times)


def run_opo_trajectories(config: OPOConfig) -> OPOTrajectorySet:
    """Monitored-cavity ensemble with a deterministic reference run.

    Each trajectory applies the diffusive pump-quadrature record; signal
    loss is never monitored.  The returned set carries per-trajectory
    plateau segmentations, jump times, and the trace distance between the
    ensemble-mean final state and the unconditioned final state.
    """
    bands = _opo_bands(config)
    nb, npu = config.n_levels, config.n_pump
    p = config.params
    sig = fock_state(nb, config.initial_level)  # level basis
    if config.initial_pump == "stationary":
        pump = coherent_state(npu, stationary_pump_amplitude(config.initial_level, p))
    elif config.initial_pump == "vacuum":
        pump = fock_state(npu, 0)
    else:
        raise ValueError("initial_pump must be 'stationary' or 'vacuum'")
    psi0 = np.kron(sig, pump)
    rho0 = np.outer(psi0, psi0.conj()).astype(np.complex128)

    noise = trajectory_noise(config)
    obs_offs, obs_coefs, obs_bounds = pack_bands(bands["obs"])
    theta_phase = np.exp(-1j * config.theta)
    U, Udag = _level_unitaries(config)
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:  # pragma: no cover
        from contextlib import nullcontext

        def threadpool_limits(*a, **k):
            return nullcontext()

    # the compiled ensemble already parallelizes over trajectories; BLAS
    # threading inside it only oversubscribes the cores
    with threadpool_limits(limits=1, user_api="blas"):
        records, currents, finals = run_ensemble(
            rho0,
            noise,
            config.dt,
            config.record_every,
            U, Udag, config.n_levels, config.n_pump,
            bands["G"][0], bands["G"][1],
            bands["La"][0], bands["La"][1],
            bands["Lb"][0], bands["Lb"][1],
            theta_phase,
            obs_offs, obs_coefs, obs_bounds,
            1000,
        )
    n_rec = records.shape[1] - 1
    times = np.arange(n_rec + 1) * config.record_every * config.dt

    def to_record(idx):
        level = records[idx, :, 0]
        pump_p = records[idx, :, 1]
        var_x = np.clip(records[idx, :, 3] - records[idx, :, 2] ** 2, 1e-12, None)
        return TrajectoryRecord(
            times=times,
            expectations={
                "level": level,
                "pump_p": pump_p,
                "signal_x_var": var_x,
                "signal_db": conventions.variance_db(var_x),
            },
            current=currents[idx],
            seed=(config.base_seed, idx) if idx < config.n_traj else None,
            dt=config.dt,
        )

    traj_records = [to_record(i) for i in range(config.n_traj)]
    ref_record = to_record(config.n_traj)

    plateaus, jumps = [], []
    for rec in traj_records:
        segs, jts = detect_plateaus(
            times,
            rec.expectations["level"],
            rec.expectations["pump_p"],
            rec.expectations["signal_db"],
        )
        plateaus.append(segs)
        jumps.append(jts)

    mean_rho = np.mean(finals[: config.n_traj], axis=0)
    td = trace_distance(mean_rho, finals[config.n_traj])
    levels = np.array(
        [stationary_pump_amplitude(N, p).imag for N in range(config.n_levels)]
    )
    return OPOTrajectorySet(
        config=config,
        times=times,
        records=traj_records,
        reference_record=ref_record,
        plateaus=plateaus,
        jumps=jumps,
        mean_final_trace_distance=float(td),
        stationary_levels=levels,
    )
