"""The exact scalar diffusion for the distance between two landmarks.

When exactly two landmarks move by Brownian motion under a radial
kernel, their Euclidean distance is an autonomous one-dimensional Ito
diffusion

    dr = b(r) dt + sigma(r) dB,
    sigma(r) = sqrt(2 (lam - k(r))),
    b(r)     = ((d - 1) k(r) - lam) k'(r) / (lam + k(r))
               + (d - 1) (lam - k(r)) / r,

with ``lam = k(0)``.  The drift is one half the Laplace-Beltrami
operator applied to the distance: its first term is the radial
component, and the second is the Bessel-type contribution of the d - 1
angular directions (divergence of the radial unit field), which
vanishes for d = 1.  Both terms scale like r^(gamma - 1) near zero when
lam - k(r) ~ D r^gamma.  Two consistency anchors pin the formula: for
d = 1 it reduces exactly to -lam k'/(lam + k), and for a constant
kernel (landmarks moving independently) it reduces to the classical
Bessel(d) drift (d - 1)/r; the full landmark simulator reproduces it
weakly to first order in the step size.

This module evaluates the coefficients and integrates the equation
with Euler-Maruyama, absorbing paths at zero: a step that lands at or
below ``absorb_eps`` freezes the path at 0 and stops applying noise.
Paths draw from counter-based per-path streams, so an ensemble is
deterministic given the master seed and a path's values do not depend
on how many other paths are requested.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend, streams
from .kernels import RadialKernel

__all__ = [
    "DistanceCoefficients",
    "DistancePath",
    "DistanceEnsemble",
    "sigma",
    "drift",
    "radial_drift_component",
    "simulate_distance",
    "write_distance_csv",
]


@dataclass(frozen=True)
class DistanceCoefficients:
    """Kernel plus ambient dimension; everything sigma and b depend on."""

    kernel: object
    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"ambient dimension must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))


def sigma(coeffs, r):
    """Diffusivity sqrt(2 (lam - k(r))), r >= 0; clamped at 0 before the root."""
    gap = np.asarray(coeffs.kernel.gap(r))
    out = np.sqrt(2.0 * np.maximum(gap, 0.0))
    return float(out) if out.ndim == 0 else out


def drift(coeffs, r):
    """Distance drift: radial part plus the (d-1)-dimensional Bessel part.

    ((d-1) k(r) - lam) k'(r) / (lam + k(r)) + (d-1) (lam - k(r)) / r
    for r > 0; the second term is absent in one ambient dimension.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("drift requires r > 0")
    k = coeffs.kernel
    kv = np.asarray(k.eval(r))
    kd = np.asarray(k.eval_derivative(r))
    out = ((coeffs.d - 1.0) * kv - k.lam) * kd / (k.lam + kv)
    if coeffs.d > 1:
        out = out + (coeffs.d - 1.0) * np.asarray(k.gap(r)) / r
    return float(out) if out.ndim == 0 else out


def radial_drift_component(coeffs, r):
    """The radial part of the drift alone: ((d-1) k - lam) k' / (lam + k).

    This is the component the singularity classifier's closed-form scale
    density is built from; it coincides with the full drift when d = 1.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("drift requires r > 0")
    k = coeffs.kernel
    kv = np.asarray(k.eval(r))
    kd = np.asarray(k.eval_derivative(r))
    out = ((coeffs.d - 1.0) * kv - k.lam) * kd / (k.lam + kv)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DistancePath:
    """One sample path of the distance diffusion.

    ``values`` has length steps+1 with values[0] = r0; once absorbed the
    entries are exactly 0 and no further noise is applied.  ``failed_at``
    marks a non-finite Euler step (path frozen at its last finite value).
    """

    r0: float
    dt: float
    values: np.ndarray
    absorbed_at: int | None
    seed: int
    path_index: int
    failed_at: int | None = None

    @property
    def absorbed(self):
        return self.absorbed_at is not None

    @property
    def times(self):
        return self.dt * np.arange(len(self.values))


@dataclass(frozen=True)
class DistanceEnsemble:
    coeffs: DistanceCoefficients
    r0: float
    dt: float
    seed: int
    absorb_eps: float
    values: np.ndarray          # (paths, steps + 1)
    absorbed_at: np.ndarray     # (paths,), -1 when never absorbed
    failed_at: np.ndarray       # (paths,), -1 when never failed

    @property
    def n_paths(self):
        return self.values.shape[0]

    @property
    def paths(self):
        return [
            DistancePath(
                r0=self.r0,
                dt=self.dt,
                values=self.values[p],
                absorbed_at=int(self.absorbed_at[p]) if self.absorbed_at[p] >= 0 else None,
                seed=self.seed,
                path_index=p,
                failed_at=int(self.failed_at[p]) if self.failed_at[p] >= 0 else None,
            )
            for p in range(self.n_paths)
        ]

    @property
    def absorbed_fraction(self):
        return float(np.mean(self.absorbed_at >= 0))

    def final_values(self):
        return self.values[:, -1]


def simulate_distance(coeffs, r0, t_max, steps, seed, paths, absorb_eps=None, backend=None):
    """Euler-Maruyama ensemble for the distance diffusion.

    ``absorb_eps`` defaults to 1e-8 * r0.  ``t_max = 0`` or ``steps = 0``
    degenerates to the initial value alone.  Identical inputs produce
    bitwise-identical ensembles on a given backend.
    """
    if not isinstance(coeffs.kernel, RadialKernel):
        raise TypeError("simulate_distance needs a kernel with a pointwise evaluator")
    r0 = float(r0)
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    if t_max < 0 or steps < 0:
        raise ValueError("t_max and steps must be nonnegative")
    if paths < 1:
        raise ValueError("need at least one path")
    if absorb_eps is None:
        absorb_eps = 1e-8 * r0
    absorb_eps = float(absorb_eps)
    if absorb_eps < 0:
        raise ValueError("absorb_eps must be nonnegative")

    if t_max == 0 or steps == 0:
        values = np.full((paths, 1), r0)
        return DistanceEnsemble(
            coeffs, r0, 0.0, int(seed), absorb_eps, values,
            np.full(paths, -1, np.int64), np.full(paths, -1, np.int64),
        )

    dt = t_max / steps
    noise = np.empty((paths, steps))
    for p in range(paths):
        noise[p] = streams.path_normals(seed, p, steps)

    kern = coeffs.kernel
    args = (kern.code, kern.scale, kern.lam, coeffs.d - 1.0, r0, dt, noise, absorb_eps)
    if _backend.backend(backend) == "numba":
        from . import _engine_numba as eng
    else:
        from . import _engine_numpy as eng
    values, absorbed_at, failed_at = eng.distance_paths(*args)
    if np.any(failed_at >= 0):
        import warnings

        bad = np.flatnonzero(failed_at >= 0)
        warnings.warn(
            f"non-finite Euler step aborted {bad.size} path(s) "
            f"(first: path {bad[0]} at step {failed_at[bad[0]]}); "
            "values frozen at the last finite state",
            RuntimeWarning,
            stacklevel=2,
        )
    return DistanceEnsemble(coeffs, r0, dt, int(seed), absorb_eps, values, absorbed_at, failed_at)


def write_distance_csv(ensemble, fileobj):
    """Dump an ensemble as CSV with columns path_id,step,t,r,absorbed."""
    fileobj.write("path_id,step,t,r,absorbed\n")
    for p in range(ensemble.n_paths):
        absorbed_at = ensemble.absorbed_at[p]
        for k, r in enumerate(ensemble.values[p]):
            absorbed = 1 if (absorbed_at >= 0 and k >= absorbed_at) else 0
            fileobj.write(f"{p},{k},{float(k * ensemble.dt)!r},{float(r)!r},{absorbed}\n")
