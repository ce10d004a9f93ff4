"""Pure-numpy execution engine.

The fallback advances every live path in lockstep, one time step per
iteration, using batched linear algebra over the path axis.  The scalar
distance integrator performs the same elementwise arithmetic as the
numba twin and matches it bitwise; the landmark integrator matches to
floating-point contraction-order differences.
"""

import numpy as np

from . import _profiles


def distance_paths(code, scale, lam, dminus1, r0, dt, noise, absorb_eps):
    """Vectorized twin of the numba distance integrator."""
    n_paths, steps = noise.shape
    values = np.zeros((n_paths, steps + 1))
    values[:, 0] = r0
    absorbed_at = np.full(n_paths, -1, np.int64)
    failed_at = np.full(n_paths, -1, np.int64)
    sqdt = np.sqrt(dt)
    r = np.full(n_paths, float(r0))
    alive = np.ones(n_paths, dtype=bool)
    for k in range(steps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        rk = r[idx]
        kv = _profiles.profile_value(code, scale, rk)
        kd = _profiles.profile_derivative(code, scale, rk)
        gp = _profiles.profile_gap(code, scale, rk)
        b = (dminus1 * kv - lam) * kd / (lam + kv)
        if dminus1 > 0.0:
            b = b + dminus1 * gp / rk
        sig = np.sqrt(2.0 * np.maximum(gp, 0.0))
        rn = rk + b * dt + sig * sqdt * noise[idx, k]

        bad = ~np.isfinite(rn)
        if np.any(bad):
            bad_idx = idx[bad]
            failed_at[bad_idx] = k + 1
            values[bad_idx, k + 1 :] = r[bad_idx, None]
            alive[bad_idx] = False
        absorbed = np.isfinite(rn) & (rn <= absorb_eps)
        if np.any(absorbed):
            abs_idx = idx[absorbed]
            absorbed_at[abs_idx] = k + 1
            alive[abs_idx] = False  # values stay 0 from k+1 on
        ok = ~bad & ~absorbed
        ok_idx = idx[ok]
        r[ok_idx] = rn[ok]
        values[ok_idx, k + 1] = rn[ok]
    return values, absorbed_at, failed_at


def _pair_index(n):
    return np.triu_indices(n, 1)


def _batched_cometric(states, n, d, code, scale, lam):
    """K for a batch of flat states (A, n*d) -> (A, nd, nd)."""
    A = states.shape[0]
    pts = states.reshape(A, n, d)
    diffs = pts[:, :, None, :] - pts[:, None, :, :]
    dists = np.sqrt(np.sum(diffs * diffs, axis=-1))
    iu, ju = _pair_index(n)
    kmat = np.full((A, n, n), lam)
    kvals = _profiles.profile_value(code, scale, dists[:, iu, ju])
    kmat[:, iu, ju] = kvals
    kmat[:, ju, iu] = kvals
    K = np.einsum("aij,ce->aicje", kmat, np.eye(d)).reshape(A, n * d, n * d)
    return K, pts, dists


def _batched_partials(pts, dists, n, d, code, scale):
    """dK for a batch -> (A, nd, nd, nd); slice [.., a] pattern as in geometry."""
    A = pts.shape[0]
    nd = n * d
    out = np.zeros((A, nd, nd, nd))
    eye = np.eye(d)
    for p in range(n):
        for i in range(n):
            if i == p:
                continue
            r = dists[:, p, i]
            kd = _profiles.profile_derivative(code, scale, r)
            grad = kd[:, None] * (pts[:, p, :] - pts[:, i, :]) / r[:, None]
            for cc in range(d):
                block = grad[:, cc, None, None] * eye
                out[:, p * d + cc, p * d : (p + 1) * d, i * d : (i + 1) * d] = block
                out[:, p * d + cc, i * d : (i + 1) * d, p * d : (p + 1) * d] = block
    return out


def _min_pair_dist(states, n, d):
    A = states.shape[0]
    pts = states.reshape(A, n, d)
    diffs = pts[:, :, None, :] - pts[:, None, :, :]
    dists = np.sqrt(np.sum(diffs * diffs, axis=-1))
    iu, ju = _pair_index(n)
    return dists[:, iu, ju].min(axis=1)


def landmark_ensemble(q0, n, d, code, scale, lam, dt, noise,
                      eps_abs, eps_rel_abs, drop_decades, window, store_traj):
    """Lockstep twin of the numba landmark integrator, all paths at once.

    ``noise`` has shape (paths, steps, nd).  Returns per-path arrays with
    the same stop semantics as the numba engine.
    """
    n_paths, steps, nd = noise.shape
    sqdt = np.sqrt(dt)
    states = np.tile(np.asarray(q0, dtype=float), (n_paths, 1))

    min_dists = np.zeros((n_paths, steps + 1))
    traj = np.zeros((n_paths, steps + 1, nd)) if store_traj else None
    reason = np.zeros(n_paths, np.int64)
    last = np.full(n_paths, steps, np.int64)

    md0 = _min_pair_dist(states, n, d)
    min_dists[:, 0] = md0
    if store_traj:
        traj[:, 0, :] = states
    min_attained = md0.copy()
    max_norm = np.sqrt(np.sum(states * states, axis=1))

    # every live path has recorded exactly k+1 values at step k, so the
    # rolling window has a common length and write position
    ring = np.zeros((n_paths, window))
    ring[:, 0] = md0
    drop_factor = 10.0 ** drop_decades

    alive = np.ones(n_paths, dtype=bool)
    for k in range(steps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        sub = states[idx]
        K, pts, dists = _batched_cometric(sub, n, d, code, scale, lam)
        dK = _batched_partials(pts, dists, n, d, code, scale)
        # one symmetric eigendecomposition serves the inverse and the root;
        # near-singular cometrics stop their path instead of raising
        w, V = np.linalg.eigh(K)
        singular = (w[:, 0] <= 1e-14 * w[:, -1]) | (w[:, -1] <= 0.0)
        w_safe = np.where(singular[:, None], 1.0, w)
        g = np.einsum("aie,ae,aje->aij", V, 1.0 / w_safe, V)
        dg = -np.einsum("aIb,aJbc,acd->aJId", g, dK, g)
        # dg[., J] = -g dK[J] g; gamma and drift as in geometry.christoffel
        gamma = 0.5 * (
            np.einsum("aip,alpm->ailm", K, dg)
            + np.einsum("aip,ampl->ailm", K, dg)
            - np.einsum("aip,aplm->ailm", K, dg)
        )
        drift = -0.5 * np.einsum("alm,ailm->ai", K, gamma)
        rootw = np.sqrt(np.clip(w_safe, 0.0, None))
        zeta = np.einsum("aje,aj->ae", V, noise[idx, k, :]) * rootw
        new = sub + drift * dt + sqdt * np.einsum("aie,ae->ai", V, zeta)

        finite = np.all(np.isfinite(new), axis=1) & ~singular
        md = np.where(finite, _min_pair_dist(np.where(finite[:, None], new, 0.0), n, d), np.nan)

        ring_len = min(k + 1, window)
        prev_max = ring[idx, :ring_len].max(axis=1)
        bad = ~finite
        trip_small = finite & ((md < eps_abs) | (md < eps_rel_abs))
        trip_rapid = finite & ~trip_small & (prev_max > md * drop_factor)

        gidx = idx[finite]
        if gidx.size:
            min_attained[gidx] = np.minimum(min_attained[gidx], md[finite])
            norms = np.sqrt(np.sum(new[finite] * new[finite], axis=1))
            max_norm[gidx] = np.maximum(max_norm[gidx], norms)

        stopped = bad | trip_small | trip_rapid
        sidx = idx[stopped]
        reason[sidx] = np.where(bad, 3, np.where(trip_small, 1, 2))[stopped]
        last[sidx] = k
        alive[sidx] = False

        ok = ~stopped
        oidx = idx[ok]
        if oidx.size:
            states[oidx] = new[ok]
            min_dists[oidx, k + 1] = md[ok]
            if store_traj:
                traj[oidx, k + 1, :] = new[ok]
            ring[oidx, (k + 1) % window] = md[ok]
    return traj, min_dists, reason, last, min_attained, max_norm
