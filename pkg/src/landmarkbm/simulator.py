"""Euler-Maruyama simulation of landmark Brownian motion.

One step of the coordinate process is

    q' = q - 1/2 contract(K(q), Gamma(q)) dt + sqrt_psd(K(q)) sqrt(dt) xi,

with ``contract(K, Gamma)^i = sum_{l,m} K^{lm} Gamma^i_{lm}`` over flat
indices and ``xi`` standard normal.  A collision monitor watches the
minimum pairwise distance every step and stops a path when the distance
becomes very small (absolute or relative to its initial value) or drops
by several decades within a short window; the configuration that trips
the monitor is not recorded, so every recorded state keeps the
landmarks distinct.  Per-path failures never abort the ensemble.

Paths are independent and use counter-based noise streams keyed by
(master seed, path index), consumed in (step, coordinate) order, so an
ensemble is bitwise reproducible regardless of worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _backend, streams
from .geometry import LandmarkConfig, christoffel, cometric_matrix, sqrt_psd
from .kernels import RadialKernel

__all__ = [
    "StopReason",
    "StopThresholds",
    "StopRecord",
    "PathResult",
    "TrajectoryEnsemble",
    "em_step",
    "min_pairwise_distance",
    "collision_monitor",
    "simulate",
    "write_trajectory_csv",
    "write_mindist_csv",
]


class StopReason(Enum):
    COMPLETED = "Completed"
    COLLISION_SMALL_DISTANCE = "CollisionSmallDistance"
    COLLISION_RAPID_DECREASE = "CollisionRapidDecrease"
    NUMERICAL_FAILURE = "NumericalFailure"

    @property
    def is_collision(self):
        return self in (StopReason.COLLISION_SMALL_DISTANCE, StopReason.COLLISION_RAPID_DECREASE)


_REASON_BY_CODE = {
    0: StopReason.COMPLETED,
    1: StopReason.COLLISION_SMALL_DISTANCE,
    2: StopReason.COLLISION_RAPID_DECREASE,
    3: StopReason.NUMERICAL_FAILURE,
}


@dataclass(frozen=True)
class StopThresholds:
    """Collision-monitor policy.

    ``eps_abs`` and ``eps_rel`` (relative to the initial minimum
    distance) trigger CollisionSmallDistance; a drop of more than
    ``drop_decades`` decades within the last ``window`` recorded
    distances triggers CollisionRapidDecrease.
    """

    eps_abs: float = 1e-8
    eps_rel: float = 1e-6
    drop_decades: float = 3.0
    window: int = 10

    def __post_init__(self):
        if self.eps_abs < 0 or self.eps_rel < 0:
            raise ValueError("distance thresholds must be nonnegative")
        if self.drop_decades <= 0 or self.window < 1:
            raise ValueError("bad rapid-decrease parameters")


@dataclass(frozen=True)
class StopRecord:
    """Why and where a path stopped.

    ``step`` indexes the last recorded state; it equals the requested
    step count exactly when the path completed.
    """

    reason: StopReason
    step: int
    min_distance: float
    max_norm: float


@dataclass(frozen=True)
class PathResult:
    min_dists: np.ndarray            # (recorded_steps + 1,)
    stop: StopRecord
    states: np.ndarray | None = None  # (recorded_steps + 1, n*d) when stored


@dataclass(frozen=True)
class TrajectoryEnsemble:
    kernel_spec: str
    d: int
    n: int
    dt: float
    steps: int
    seed: int
    thresholds: StopThresholds
    paths: tuple

    @property
    def n_paths(self):
        return len(self.paths)

    def stop_reasons(self):
        return [p.stop.reason for p in self.paths]

    def collision_count(self):
        return sum(1 for p in self.paths if p.stop.reason.is_collision)


def min_pairwise_distance(config):
    """Smallest Euclidean distance among the landmark pairs."""
    dists = config.pairwise_distances()
    iu = np.triu_indices(config.n, 1)
    return float(dists[iu].min())


def collision_monitor(window, thresholds, initial_min_dist):
    """Evaluate the stopping rule on a window of minimum distances.

    ``window`` holds the most recent values with the current one last.
    Returns a collision StopReason or None.
    """
    window = np.asarray(window, dtype=float)
    if window.ndim != 1 or window.size == 0:
        raise ValueError("window must be a nonempty 1-d sequence")
    current = window[-1]
    if current < thresholds.eps_abs or current < thresholds.eps_rel * initial_min_dist:
        return StopReason.COLLISION_SMALL_DISTANCE
    prev = window[-(thresholds.window + 1) : -1]
    if prev.size and prev.max() > current * 10.0 ** thresholds.drop_decades:
        return StopReason.COLLISION_RAPID_DECREASE
    return None


def em_step(config, kernel, dt, noise):
    """One Euler-Maruyama step of the landmark Brownian motion."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    noise = np.asarray(noise, dtype=float)
    nd = config.n * config.d
    if noise.shape != (nd,):
        raise ValueError(f"noise must have shape ({nd},)")
    K = cometric_matrix(config, kernel)
    gamma = christoffel(config, kernel)
    drift = -0.5 * np.einsum("lm,ilm->i", K, gamma)
    S = sqrt_psd(K)
    flat = config.flat + drift * dt + math.sqrt(dt) * (S @ noise)
    if not np.all(np.isfinite(flat)):
        raise FloatingPointError("Euler step produced a non-finite configuration")
    return LandmarkConfig(flat.reshape(config.n, config.d))


def _run_path_numba(engine, q0, n, d, kern, dt, noise, thr, eps_rel_abs, store):
    traj, mind, reason, last, min_att, max_norm = engine.landmark_path(
        q0, n, d, kern.code, kern.scale, kern.lam, dt, noise,
        thr.eps_abs, eps_rel_abs, thr.drop_decades, thr.window, store,
    )
    states = traj[: last + 1].copy() if store else None
    return PathResult(
        min_dists=mind[: last + 1].copy(),
        stop=StopRecord(_REASON_BY_CODE[reason], int(last), float(min_att), float(max_norm)),
        states=states,
    )


def simulate(kernel, initial, t_max, steps, paths, seed, thresholds=None,
             store_trajectories=False, backend=None, threads=None):
    """Simulate an ensemble of landmark Brownian paths.

    ``initial`` is a LandmarkConfig; ``steps = 0`` returns the initial
    state only.  Trajectories are retained per path only when
    ``store_trajectories`` is set; the minimum-distance series and stop
    records are always kept.
    """
    if not isinstance(kernel, RadialKernel):
        raise TypeError("simulate needs a kernel with a pointwise evaluator")
    if not isinstance(initial, LandmarkConfig):
        initial = LandmarkConfig(np.asarray(initial, dtype=float))
    if t_max < 0 or steps < 0:
        raise ValueError("t_max and steps must be nonnegative")
    if paths < 1:
        raise ValueError("need at least one path")
    thresholds = thresholds or StopThresholds()
    n, d = initial.n, initial.d
    nd = n * d
    md0 = min_pairwise_distance(initial)
    eps_rel_abs = thresholds.eps_rel * md0

    if steps == 0 or t_max == 0:
        rec = PathResult(
            min_dists=np.array([md0]),
            stop=StopRecord(StopReason.COMPLETED, 0, md0, float(np.linalg.norm(initial.flat))),
            states=initial.flat[None, :].copy() if store_trajectories else None,
        )
        return TrajectoryEnsemble(
            kernel.spec_string(), d, n, 0.0, 0, int(seed), thresholds, tuple([rec] * paths)
        )

    dt = t_max / steps
    q0 = initial.flat.astype(float)

    if _backend.backend(backend) == "numba":
        from . import _engine_numba as engine

        def one(p):
            noise = streams.path_normals(seed, p, (steps, nd))
            return _run_path_numba(
                engine, q0, n, d, kernel, dt, noise, thresholds, eps_rel_abs, store_trajectories
            )

        workers = _backend.worker_count(threads)
        if workers > 1 and paths > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(one, range(paths)))
        else:
            results = [one(p) for p in range(paths)]
    else:
        from . import _engine_numpy as engine

        noise = np.empty((paths, steps, nd))
        for p in range(paths):
            noise[p] = streams.path_normals(seed, p, (steps, nd))
        traj, mind, reason, last, min_att, max_norm = engine.landmark_ensemble(
            q0, n, d, kernel.code, kernel.scale, kernel.lam, dt, noise,
            thresholds.eps_abs, eps_rel_abs, thresholds.drop_decades, thresholds.window,
            store_trajectories,
        )
        results = []
        for p in range(paths):
            lp = int(last[p])
            results.append(
                PathResult(
                    min_dists=mind[p, : lp + 1].copy(),
                    stop=StopRecord(
                        _REASON_BY_CODE[int(reason[p])], lp, float(min_att[p]), float(max_norm[p])
                    ),
                    states=traj[p, : lp + 1].copy() if store_trajectories else None,
                )
            )

    return TrajectoryEnsemble(
        kernel.spec_string(), d, n, dt, steps, int(seed), thresholds, tuple(results)
    )


def write_trajectory_csv(ensemble, fileobj):
    """Trajectory CSV: path_id,step,t,x_1_1..x_n_d,min_dist,stop_reason.

    The stop_reason column is empty except on a path's final recorded
    row, which carries its StopRecord reason.
    """
    if any(p.states is None for p in ensemble.paths):
        raise ValueError("trajectory CSV requires states; simulate with store_trajectories=True")
    coords = [f"x_{i + 1}_{c + 1}" for i in range(ensemble.n) for c in range(ensemble.d)]
    fileobj.write("path_id,step,t," + ",".join(coords) + ",min_dist,stop_reason\n")
    for pid, path in enumerate(ensemble.paths):
        final = len(path.min_dists) - 1
        for k in range(final + 1):
            reason = path.stop.reason.value if k == final else ""
            xs = ",".join(repr(float(x)) for x in path.states[k])
            fileobj.write(
                f"{pid},{k},{float(k * ensemble.dt)!r},{xs},{float(path.min_dists[k])!r},{reason}\n"
            )


def write_mindist_csv(ensemble, fileobj):
    """Minimum-distance CSV: path_id,step,t,min_dist."""
    fileobj.write("path_id,step,t,min_dist\n")
    for pid, path in enumerate(ensemble.paths):
        for k, md in enumerate(path.min_dists):
            fileobj.write(f"{pid},{k},{float(k * ensemble.dt)!r},{float(md)!r}\n")
