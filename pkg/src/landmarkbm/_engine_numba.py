"""numba-compiled hot loops.

Imported lazily, only when the numba backend is selected.  Each function
mirrors its numpy twin in ``_engine_numpy`` step for step; the distance
integrator performs identical scalar arithmetic in identical order, so
the two backends agree bitwise there.  The landmark integrator differs
only in floating-point summation order inside the tensor contractions.
"""

import numba
import numpy as np

from . import _profiles

_value = numba.njit(cache=True)(_profiles.profile_value)
_deriv = numba.njit(cache=True)(_profiles.profile_derivative)
_gap = numba.njit(cache=True)(_profiles.profile_gap)


@numba.njit(cache=True, nogil=True)
def distance_paths(code, scale, lam, dminus1, r0, dt, noise, absorb_eps):
    """Euler-Maruyama for the scalar distance diffusion, all paths.

    Returns (values, absorbed_at, failed_at); values are frozen at 0
    from the absorption step onward, and at the last finite value after
    a numerical failure.
    """
    n_paths, steps = noise.shape
    values = np.zeros((n_paths, steps + 1))
    absorbed_at = np.full(n_paths, -1, np.int64)
    failed_at = np.full(n_paths, -1, np.int64)
    sqdt = np.sqrt(dt)
    for p in range(n_paths):
        r = r0
        values[p, 0] = r0
        for k in range(steps):
            kv = _value(code, scale, r)
            kd = _deriv(code, scale, r)
            gp = _gap(code, scale, r)
            b = (dminus1 * kv - lam) * kd / (lam + kv)
            if dminus1 > 0.0:
                b = b + dminus1 * gp / r
            sig = np.sqrt(2.0 * max(gp, 0.0))
            rn = r + b * dt + sig * sqdt * noise[p, k]
            if not np.isfinite(rn):
                failed_at[p] = k + 1
                for j in range(k + 1, steps + 1):
                    values[p, j] = r
                break
            if rn <= absorb_eps:
                absorbed_at[p] = k + 1
                break  # values stay 0 from k+1 on
            r = rn
            values[p, k + 1] = rn
    return values, absorbed_at, failed_at


@numba.njit(cache=True, nogil=True)
def landmark_path(q0, n, d, code, scale, lam, dt, noise,
                  eps_abs, eps_rel_abs, drop_decades, window, store_traj):
    """One landmark Brownian path with collision monitoring.

    Returns (traj, min_dists, reason, last_step, min_attained, max_norm)
    where reason is 0 completed, 1 small distance, 2 rapid decrease,
    3 numerical failure, and last_step indexes the final recorded state.
    The state that trips the monitor is not recorded.
    """
    nd = n * d
    steps = noise.shape[0]
    q = q0.copy()
    if store_traj:
        traj = np.zeros((steps + 1, nd))
        traj[0] = q
    else:
        traj = np.zeros((1, nd))
    min_dists = np.zeros(steps + 1)

    K = np.zeros((nd, nd))
    dK = np.zeros((nd, nd, nd))
    g = np.zeros((nd, nd))
    tmp = np.zeros((nd, nd))
    dg = np.zeros((nd, nd, nd))
    gamma = np.zeros((nd, nd, nd))
    drift = np.zeros(nd)
    qn = np.zeros(nd)
    proj = np.zeros(nd)
    sqdt = np.sqrt(dt)

    # initial min distance and norm
    md = 1e300
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for c in range(d):
                diff = q[i * d + c] - q[j * d + c]
                acc += diff * diff
            dist = np.sqrt(acc)
            if dist < md:
                md = dist
    min_dists[0] = md
    min_attained = md
    max_norm = np.sqrt(np.dot(q, q))

    ring = np.zeros(window)
    ring[0] = md
    ring_len = 1
    ring_pos = 1

    reason = 0
    last = steps
    drop_factor = 10.0 ** drop_decades

    for k in range(steps):
        # cometric
        for i in range(n):
            for j in range(i, n):
                if i == j:
                    kv = lam
                else:
                    acc = 0.0
                    for c in range(d):
                        diff = q[i * d + c] - q[j * d + c]
                        acc += diff * diff
                    kv = _value(code, scale, np.sqrt(acc))
                for c in range(d):
                    K[i * d + c, j * d + c] = kv
                    K[j * d + c, i * d + c] = kv
        # cometric partials
        for p in range(n):
            for i in range(n):
                if i == p:
                    continue
                acc = 0.0
                for c in range(d):
                    diff = q[p * d + c] - q[i * d + c]
                    acc += diff * diff
                r = np.sqrt(acc)
                kd = _deriv(code, scale, r)
                for cc in range(d):
                    val = kd * (q[p * d + cc] - q[i * d + cc]) / r
                    a = p * d + cc
                    for c in range(d):
                        dK[a, p * d + c, i * d + c] = val
                        dK[a, i * d + c, p * d + c] = val
        # one symmetric eigendecomposition serves the inverse and the root;
        # near-singular cometrics stop the path instead of raising
        w, V = np.linalg.eigh(K.copy())
        if w[0] <= 1e-14 * w[nd - 1] or w[nd - 1] <= 0.0:
            reason = 3
            last = k
            break
        for i in range(nd):
            for j in range(i, nd):
                acc = 0.0
                for e in range(nd):
                    acc += V[i, e] * V[j, e] / w[e]
                g[i, j] = acc
                g[j, i] = acc
        # dg[a] = -g @ dK[a] @ g
        for a in range(nd):
            for b_ in range(nd):
                for c2 in range(nd):
                    acc = 0.0
                    for e in range(nd):
                        acc += dK[a, b_, e] * g[e, c2]
                    tmp[b_, c2] = acc
            for b_ in range(nd):
                for c2 in range(nd):
                    acc = 0.0
                    for e in range(nd):
                        acc += g[b_, e] * tmp[e, c2]
                    dg[a, b_, c2] = -acc
        # Gamma^i_{lm} = 1/2 K[i,a](dg[l,a,m] + dg[m,a,l] - dg[a,l,m])
        for i in range(nd):
            for l in range(nd):
                for m in range(nd):
                    acc = 0.0
                    for a in range(nd):
                        acc += K[i, a] * (dg[l, a, m] + dg[m, a, l] - dg[a, l, m])
                    gamma[i, l, m] = 0.5 * acc
        for i in range(nd):
            acc = 0.0
            for l in range(nd):
                for m in range(nd):
                    acc += K[l, m] * gamma[i, l, m]
            drift[i] = -0.5 * acc
        for e in range(nd):
            we = np.sqrt(max(w[e], 0.0))
            acc = 0.0
            for j in range(nd):
                acc += V[j, e] * noise[k, j]
            proj[e] = we * acc
        for i in range(nd):
            acc = 0.0
            for e in range(nd):
                acc += V[i, e] * proj[e]
            qn[i] = q[i] + drift[i] * dt + sqdt * acc

        finite = True
        for i in range(nd):
            if not np.isfinite(qn[i]):
                finite = False
        if not finite:
            reason = 3
            last = k
            break

        md = 1e300
        for i in range(n):
            for j in range(i + 1, n):
                acc = 0.0
                for c in range(d):
                    diff = qn[i * d + c] - qn[j * d + c]
                    acc += diff * diff
                dist = np.sqrt(acc)
                if dist < md:
                    md = dist
        if md < min_attained:
            min_attained = md
        qnorm = np.sqrt(np.dot(qn, qn))
        if qnorm > max_norm:
            max_norm = qnorm

        if md < eps_abs or md < eps_rel_abs:
            reason = 1
            last = k
            break
        prev_max = 0.0
        for j in range(ring_len):
            if ring[j] > prev_max:
                prev_max = ring[j]
        if prev_max > md * drop_factor:
            reason = 2
            last = k
            break

        q[:] = qn
        min_dists[k + 1] = md
        if store_traj:
            traj[k + 1] = q
        ring[ring_pos] = md
        ring_pos += 1
        if ring_pos == window:
            ring_pos = 0
        if ring_len < window:
            ring_len += 1

    return traj, min_dists, reason, last, min_attained, max_norm
