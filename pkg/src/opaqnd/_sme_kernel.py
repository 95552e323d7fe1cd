"""Split-step ensemble integrator for the monitored cavity runs.

The cavity trajectories evolve a joint density matrix for ~1e5 steps per
trajectory, which rules out dense matmuls on the full space, and the
dispersive Hamiltonian is stiff (level splittings of order Delta >> loss
rates), which rules out a plain explicit Euler treatment of the
commutator.  The step is therefore split:

  1. exact unitary substep rho <- U rho U^dag, where U = exp(-i H dt) is
     block-diagonal over signal levels (H couples only pump indices
     within a level), applied as per-level small matmuls;
  2. Euler-Maruyama substep for the loss channels and the diffusive
     innovation of the monitored pump quadrature, all of which are
     banded operators with bounded rates, followed by trace
     renormalization.

Band format: a banded operator A is (offsets, coefs) with
A[i, i + offsets[b]] = coefs[b, i]; entries outside the matrix are zero.
The pure-numpy single-trajectory integrator in `evolve` provides the
reference implementation the kernel is cross-tested against.
"""

import numpy as np

try:
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAVE_NUMBA = False

    def njit(*a, **k):
        def wrap(f):
            return f

        return wrap if not (len(a) == 1 and callable(a[0])) else a[0]

    prange = range


def banded_to_dense(offsets, coefs, dim):
    A = np.zeros((dim, dim), dtype=complex)
    for b, k in enumerate(offsets):
        for i in range(dim):
            j = i + k
            if 0 <= j < dim:
                A[i, j] = coefs[b, i]
    return A


def pack_bands(band_list):
    """Stack a list of (offsets, coefs) into flat arrays with slice bounds."""
    offsets = np.concatenate([b[0] for b in band_list]).astype(np.int64)
    coefs = np.concatenate([b[1] for b in band_list], axis=0).astype(np.complex128)
    bounds = np.cumsum([0] + [b[0].size for b in band_list]).astype(np.int64)
    return offsets, coefs, bounds


@njit(cache=True)
def _left_apply(out, offs, coefs, rho, scale):
    """out += scale * A @ rho for banded A."""
    D = rho.shape[0]
    for b in range(offs.shape[0]):
        k = offs[b]
        lo = 0 if k >= 0 else -k
        hi = D - k if k >= 0 else D
        for i in range(lo, hi):
            c = coefs[b, i] * scale
            if c != 0:
                src = rho[i + k]
                dst = out[i]
                for j in range(D):
                    dst[j] += c * src[j]


@njit(cache=True)
def _left_apply_set(out, offs, coefs, rho, scale):
    """out = scale * A @ rho for banded A (overwrites out entirely)."""
    D = rho.shape[0]
    for i in range(D):
        for j in range(D):
            out[i, j] = 0.0
    _left_apply(out, offs, coefs, rho, scale)


@njit(cache=True)
def _right_apply(out, offs, coefs, rho, scale):
    """out += scale * rho @ A for banded A."""
    D = rho.shape[0]
    for b in range(offs.shape[0]):
        k = offs[b]
        lo = k if k >= 0 else 0
        hi = D if k >= 0 else D + k
        for j in range(lo, hi):
            c = coefs[b, j - k] * scale
            if c != 0:
                for i in range(D):
                    out[i, j] += c * rho[i, j - k]


@njit(cache=True)
def _right_apply_dag(out, offs, coefs, rho, scale):
    """out += scale * rho @ A^dag for banded A (bands of A itself)."""
    D = rho.shape[0]
    for b in range(offs.shape[0]):
        k = offs[b]
        lo = 0 if k >= 0 else -k
        hi = D - k if k >= 0 else D
        for j in range(lo, hi):
            c = np.conj(coefs[b, j]) * scale
            if c != 0:
                for i in range(D):
                    out[i, j] += c * rho[i, j + k]


@njit(cache=True)
def _expect(offs, coefs, rho):
    """tr(A rho) for banded A."""
    D = rho.shape[0]
    total = 0.0 + 0.0j
    for b in range(offs.shape[0]):
        k = offs[b]
        lo = 0 if k >= 0 else -k
        hi = D - k if k >= 0 else D
        for i in range(lo, hi):
            total += coefs[b, i] * rho[i + k, i]
    return total


@njit(cache=True)
def _unitary_substep(rho, work, U, Udag, n_blocks, block):
    """rho <- U rho U^dag with U block-diagonal (per-level pump unitaries)."""
    for N in range(n_blocks):
        r0 = N * block
        rows = np.ascontiguousarray(rho[r0 : r0 + block, :])
        work[r0 : r0 + block, :] = np.dot(np.ascontiguousarray(U[N]), rows)
    for M in range(n_blocks):
        c0 = M * block
        cols = np.ascontiguousarray(work[:, c0 : c0 + block])
        rho[:, c0 : c0 + block] = np.dot(cols, np.ascontiguousarray(Udag[M]))


@njit(cache=True)
def _dissipative_substep(rho, work1, work2, G_offs, G_coefs, La_offs, La_coefs,
                         Lb_offs, Lb_coefs, theta_phase, dt, dW):
    """Euler-Maruyama update for losses + innovation; returns <c + c^dag>."""
    D = rho.shape[0]
    # drift: -(G rho + rho G) + La rho La^dag + Lb rho Lb^dag.  Both sides
    # of the anticommutator are computed honestly: folding one into the
    # conjugate of the other would leave the (numerical) anti-Hermitian
    # component of rho undamped and the step unstable.
    _left_apply_set(work2, G_offs, G_coefs, rho, -1.0 + 0.0j)
    _right_apply(work2, G_offs, G_coefs, rho, -1.0 + 0.0j)
    _left_apply_set(work1, La_offs, La_coefs, rho, 1.0 + 0.0j)
    _right_apply_dag(work2, La_offs, La_coefs, work1, 1.0 + 0.0j)
    _left_apply_set(work1, Lb_offs, Lb_coefs, rho, 1.0 + 0.0j)
    _right_apply_dag(work2, Lb_offs, Lb_coefs, work1, 1.0 + 0.0j)
    # innovation: c = theta_phase * L_b
    _left_apply_set(work1, Lb_offs, Lb_coefs, rho, theta_phase)
    m = 0.0
    for i in range(D):
        m += 2.0 * work1[i, i].real
    tr = 0.0
    for i in range(D):
        for j in range(D):
            rho[i, j] += dt * work2[i, j] + dW * (
                work1[i, j] + np.conj(work1[j, i]) - m * rho[i, j]
            )
        tr += rho[i, i].real
    inv = 1.0 / tr
    for i in range(D):
        for j in range(D):
            rho[i, j] *= inv
    return m


@njit(cache=True, parallel=True)
def run_ensemble(rho0, noise, dt, record_every, U, Udag, n_blocks, block,
                 G_offs, G_coefs, La_offs, La_coefs, Lb_offs, Lb_coefs,
                 theta_phase, obs_offs, obs_coefs, obs_bounds, hermitize_every):
    """Integrate n_traj trajectories (rows of `noise`) in parallel.

    Returns (records, currents, finals): records[t, s, o] is observable o
    at record slot s of trajectory t (slot 0 is the initial state) and
    currents[t, s] the block-averaged homodyne record over the preceding
    interval.  A zero noise row integrates the unconditioned master
    equation with the same discretization.
    """
    n_traj, n_steps = noise.shape
    D = rho0.shape[0]
    n_rec = n_steps // record_every
    n_obs = obs_bounds.shape[0] - 1
    records = np.zeros((n_traj, n_rec + 1, n_obs))
    currents = np.zeros((n_traj, n_rec + 1))
    finals = np.zeros((n_traj, D, D), dtype=np.complex128)

    for t in prange(n_traj):
        rho = rho0.copy()
        work1 = np.zeros((D, D), dtype=np.complex128)
        work2 = np.zeros((D, D), dtype=np.complex128)
        for o in range(n_obs):
            records[t, 0, o] = _expect(
                obs_offs[obs_bounds[o]:obs_bounds[o + 1]],
                obs_coefs[obs_bounds[o]:obs_bounds[o + 1]],
                rho,
            ).real
        slot = 1
        block_dy = 0.0
        for s in range(1, n_steps + 1):
            _unitary_substep(rho, work1, U, Udag, n_blocks, block)
            m = _dissipative_substep(rho, work1, work2, G_offs, G_coefs,
                                     La_offs, La_coefs, Lb_offs, Lb_coefs,
                                     theta_phase, dt, noise[t, s - 1])
            block_dy += m * dt + noise[t, s - 1]
            if s % hermitize_every == 0:
                for i in range(D):
                    for j in range(i, D):
                        v = 0.5 * (rho[i, j] + np.conj(rho[j, i]))
                        rho[i, j] = v
                        rho[j, i] = np.conj(v)
            if s % record_every == 0 and slot <= n_rec:
                for o in range(n_obs):
                    records[t, slot, o] = _expect(
                        obs_offs[obs_bounds[o]:obs_bounds[o + 1]],
                        obs_coefs[obs_bounds[o]:obs_bounds[o + 1]],
                        rho,
                    ).real
                currents[t, slot] = block_dy / (record_every * dt)
                block_dy = 0.0
                slot += 1
        finals[t] = rho
    return records, currents, finals
