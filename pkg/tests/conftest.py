import numpy as np
import pytest

from landmarkbm import LandmarkConfig, make_gaussian, make_matern
from landmarkbm.kernels import AsymptoticData

SHIPPED = {
    "matern12": make_matern(0.5, 1.0),
    "matern32": make_matern(1.5, 2.0),
    "matern52": make_matern(2.5, 1.0),
    "gauss": make_gaussian(1.0),
}


@pytest.fixture(params=sorted(SHIPPED))
def shipped_kernel(request):
    return SHIPPED[request.param]


def random_config(rng, n=None, d=None, box=2.0, min_sep=0.05):
    """A random landmark configuration with a guaranteed separation."""
    n = n or int(rng.integers(2, 4))
    d = d or int(rng.integers(1, 3))
    while True:
        pts = rng.uniform(-box, box, (n, d))
        diffs = pts[:, None, :] - pts[None, :, :]
        dists = np.sqrt((diffs**2).sum(-1))
        iu = np.triu_indices(n, 1)
        if dists[iu].min() > min_sep:
            return LandmarkConfig(pts)


class PowerGapKernel:
    """Synthetic profile with gap(r) = r^gamma on (0, 1], lam = 2.

    Only meaningful on the classifier's probe range; used to exercise
    classification exponents the shipped families cannot produce.
    """

    def __init__(self, gamma):
        self.gamma = gamma
        self.lam = 2.0
        self.asymptotics = AsymptoticData(1.0, gamma, False)
        self.scale = 1.0

    def gap(self, r):
        out = np.asarray(r, float) ** self.gamma
        return float(out) if out.ndim == 0 else out

    def eval(self, r):
        out = self.lam - np.asarray(self.gap(r))
        return float(out) if out.ndim == 0 else out

    def eval_derivative(self, r):
        r = np.asarray(r, float)
        out = -self.gamma * r ** (self.gamma - 1.0)
        return float(out) if out.ndim == 0 else out


class LogGapKernel:
    """Synthetic profile with gap(r) = r^2 (1 - log r)^p on (0, 1], lam = 2.

    The log factor puts the scale-density test exactly in the band where
    a slope fit cannot decide integrability; the classifier must report
    the case as inconclusive rather than guess.
    """

    def __init__(self, p=0.8):
        self.p = p
        self.lam = 2.0
        self.asymptotics = AsymptoticData(1.0, 2.0, True)
        self.scale = 1.0

    def gap(self, r):
        r = np.asarray(r, float)
        out = r * r * (1.0 - np.log(r)) ** self.p
        return float(out) if out.ndim == 0 else out

    def eval(self, r):
        out = self.lam - np.asarray(self.gap(r))
        return float(out) if out.ndim == 0 else out

    def eval_derivative(self, r):
        r = np.asarray(r, float)
        L = 1.0 - np.log(r)
        out = -(2.0 * r * L**self.p - self.p * r * L ** (self.p - 1.0))
        out = np.asarray(out)
        return float(out) if out.ndim == 0 else out
