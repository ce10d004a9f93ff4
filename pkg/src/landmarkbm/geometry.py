"""Kernel-induced Riemannian structure on landmark configurations.

For n landmarks in R^d the cometric is the (n d) x (n d) block matrix
``K(q)^{ij} = k(|q_i - q_j|) I_d``; the metric is its inverse.  All
derivative quantities are assembled analytically: the cometric partials
come from the chain rule through k' and the pairwise distances, metric
partials from ``dg = -g (dK) g``, and the Christoffel symbols from the
standard formula

    Gamma^i_{lm} = 1/2 g^{ia} (d_l g_{am} + d_m g_{al} - d_a g_{lm}).

Flat indices are landmark-major: coordinate ``a = p*d + c`` is the c-th
component of landmark p.  Everything here is pure and thread-safe.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

__all__ = [
    "LandmarkConfig",
    "MetricFactorizationError",
    "cometric_matrix",
    "metric_matrix",
    "cometric_partials",
    "christoffel",
    "sqrt_psd",
]


class MetricFactorizationError(RuntimeError):
    """Cholesky failure on the cometric: landmarks too close for doubles."""

    def __init__(self, message, condition_estimate):
        super().__init__(f"{message} (condition estimate {condition_estimate:.3e})")
        self.condition_estimate = condition_estimate


@dataclass(frozen=True)
class LandmarkConfig:
    """n distinct landmark points in R^d.

    ``points`` has shape (n, d); the flattened view is landmark-major.
    Construction rejects coincident landmarks.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError(f"points must be (n, d), got shape {pts.shape}")
        n, d = pts.shape
        if n < 2:
            raise ValueError("need at least two landmarks")
        if d < 1:
            raise ValueError("ambient dimension must be >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("landmark coordinates must be finite")
        diffs = pts[:, None, :] - pts[None, :, :]
        dists = np.sqrt(np.sum(diffs * diffs, axis=-1))
        iu = np.triu_indices(n, 1)
        if np.any(dists[iu] <= 0.0):
            raise ValueError("landmarks must be pairwise distinct")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]

    @property
    def flat(self):
        """Flat (n*d,) coordinate vector, landmark-major."""
        return self.points.reshape(-1)

    def pairwise_distances(self):
        """Dense (n, n) matrix of Euclidean distances."""
        diffs = self.points[:, None, :] - self.points[None, :, :]
        return np.sqrt(np.sum(diffs * diffs, axis=-1))


def cometric_matrix(config, kernel):
    """The (n d) x (n d) cometric K(q), symmetric positive definite."""
    n, d = config.n, config.d
    dists = config.pairwise_distances()
    kvals = kernel.eval(dists[np.triu_indices(n, 1)])
    kmat = np.full((n, n), kernel.lam)
    kmat[np.triu_indices(n, 1)] = kvals
    kmat[np.tril_indices(n, -1)] = kmat.T[np.tril_indices(n, -1)]
    return np.einsum("ij,ce->icje", kmat, np.eye(d)).reshape(n * d, n * d)


def metric_matrix(config, kernel):
    """g(q) = K(q)^{-1} via Cholesky; fails loudly near collision."""
    K = cometric_matrix(config, kernel)
    try:
        factor = sla.cho_factor(K, lower=True)
    except np.linalg.LinAlgError as exc:
        raise MetricFactorizationError(
            "cometric is not positive definite in double precision", np.linalg.cond(K)
        ) from exc
    g = sla.cho_solve(factor, np.eye(K.shape[0]))
    return 0.5 * (g + g.T)


def cometric_partials(config, kernel):
    """All coordinate partials of K.

    Returns an array of shape (n d, n d, n d) whose slice ``[a]`` is the
    symmetric matrix dK/dq^a.  Diagonal blocks of K are constant, so only
    off-diagonal blocks touching the differentiated landmark contribute.
    """
    n, d = config.n, config.d
    nd = n * d
    pts = config.points
    dists = config.pairwise_distances()
    out = np.zeros((nd, nd, nd))
    eye = np.eye(d)
    for p in range(n):
        for i in range(n):
            if i == p:
                continue
            r = dists[p, i]
            kprime = kernel.eval_derivative(r)
            grad = kprime * (pts[p] - pts[i]) / r  # d k(r_pi) / d q_p
            for c in range(d):
                block = grad[c] * eye
                out[p * d + c, p * d : (p + 1) * d, i * d : (i + 1) * d] = block
                out[p * d + c, i * d : (i + 1) * d, p * d : (p + 1) * d] = block
    return out


def christoffel(config, kernel):
    """Christoffel symbols Gamma^i_{lm} over flat coordinates.

    Metric partials are obtained analytically from ``dg = -g (dK) g``
    rather than by differencing the inverse, which keeps them usable at
    small separations where the cometric is ill-conditioned.
    """
    K = cometric_matrix(config, kernel)
    g = metric_matrix(config, kernel)
    dK = cometric_partials(config, kernel)
    dg = -np.einsum("ab,Ibc,cd->Iad", g, dK, g)
    gamma = 0.5 * (
        np.einsum("ia,lam->ilm", K, dg)
        + np.einsum("ia,mal->ilm", K, dg)
        - np.einsum("ia,alm->ilm", K, dg)
    )
    return gamma


def sqrt_psd(matrix):
    """Symmetric positive square root of a symmetric PSD matrix.

    Uses the symmetric eigendecomposition (basis independent and
    deterministic).  Inputs with an eigenvalue below -1e-12 * ||K|| are
    rejected; tiny negative eigenvalues from roundoff are clipped to 0.
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(M).max())):
        raise ValueError("matrix is not symmetric")
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    norm = np.abs(w).max() if w.size else 0.0
    if w.min() < -1e-12 * norm:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w.min():.3e})")
    S = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T
    return 0.5 * (S + S.T)
