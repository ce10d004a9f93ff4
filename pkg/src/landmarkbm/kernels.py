"""Radial kernel profiles, their derivatives, and near-zero asymptotics.

A landmark cometric is built from a scalar profile ``k`` through
``K(x, y) = k(|x - y|) I_d``.  This module ships the half-integer
exponential-polynomial (Matern-form) family for orders 1/2 .. 7/2 and
the squared-exponential (Gaussian) profile, each with an explicit
positive ``scale`` multiplier.  Every profile records its behaviour
``k(0) - k(r) = D r^gamma + o(r^gamma)`` near zero, which is the only
kernel information the collision classifier needs.

Profiles without a pointwise evaluator (fractional orders, the
``r^2 log r`` critical case) are representable as bare
:class:`AsymptoticData` for classification-only use.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _profiles

__all__ = [
    "AsymptoticData",
    "RadialKernel",
    "make_matern",
    "make_gaussian",
    "parse_kernel_spec",
    "shipped_kernels",
]

_SUPPORTED_NU = (0.5, 1.5, 2.5, 3.5)


@dataclass(frozen=True)
class AsymptoticData:
    """Leading behaviour of k(0) - k(r) as r tends to zero.

    ``D`` is the leading coefficient, ``gamma`` the exponent, and
    ``has_log`` marks an extra ``log(1/r)`` factor (the integer-order-1
    critical case, never produced by the half-integer constructors).
    """

    D: float
    gamma: float
    has_log: bool = False

    def __post_init__(self):
        if not self.D > 0:
            raise ValueError(f"leading coefficient must be positive, got {self.D}")
        if not self.gamma > 0:
            raise ValueError(f"gap exponent must be positive, got {self.gamma}")


@dataclass(frozen=True)
class RadialKernel:
    """An evaluable radial profile k with derivative and asymptotics.

    ``lam`` is k(0).  Instances are immutable and all evaluation methods
    are pure, so kernels can be shared freely across threads.
    """

    family: str
    nu: float | None
    scale: float
    code: int = field(repr=False)
    lam: float
    asymptotics: AsymptoticData

    def eval(self, r):
        """k(r) for r >= 0 (scalar or array)."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("kernel argument must be nonnegative")
        out = _profiles.profile_value(self.code, self.scale, r)
        return float(out) if out.ndim == 0 else out

    def eval_derivative(self, r):
        """k'(r) for r > 0 (scalar or array)."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ValueError("kernel derivative requires r > 0")
        out = _profiles.profile_derivative(self.code, self.scale, r)
        return float(out) if out.ndim == 0 else out

    def gap(self, r):
        """k(0) - k(r), computed without cancellation for small r."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ValueError("kernel argument must be nonnegative")
        out = _profiles.profile_gap(self.code, self.scale, r)
        return float(out) if out.ndim == 0 else out

    def spec_string(self):
        """Canonical CLI/config spec string for this kernel."""
        if self.family == "matern":
            return f"matern:{_fmt(self.nu)}:{_fmt(self.scale)}"
        return f"gauss:{_fmt(self.scale)}"


def _fmt(x):
    x = float(x)
    return f"{int(x)}" if x == int(x) else repr(x)


def make_matern(nu, scale=1.0):
    """Half-integer exponential-polynomial kernel scale * e^{-r} * P_nu(r).

    P_{1/2} = 1, P_{3/2} = 1 + r, P_{5/2} = 3 + 3r + r^2,
    P_{7/2} = 15 + 15r + 6r^2 + r^3.  Orders beyond 7/2 are not shipped.
    """
    nu = float(nu)
    two_nu = 2.0 * nu
    if two_nu <= 0 or two_nu != round(two_nu) or round(two_nu) % 2 == 0:
        raise ValueError(f"order must be a positive half-integer, got {nu}")
    if nu not in _SUPPORTED_NU:
        raise ValueError(f"unsupported order {nu}: shipped table covers 1/2 .. 7/2")
    scale = float(scale)
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    code = _profiles.MATERN_CODE_BY_NU[nu]
    lam = scale * _profiles.VALUE_AT_ZERO[code]
    asym = AsymptoticData(
        D=scale * _profiles.GAP_COEFF[code],
        gamma=_profiles.GAP_EXPONENT[code],
        has_log=False,
    )
    return RadialKernel("matern", nu, scale, code, lam, asym)


def make_gaussian(scale=1.0):
    """Squared-exponential kernel scale * exp(-r^2)."""
    scale = float(scale)
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    code = _profiles.GAUSSIAN
    asym = AsymptoticData(D=scale, gamma=2.0, has_log=False)
    return RadialKernel("gaussian", None, scale, code, lam=scale, asymptotics=asym)


def shipped_kernels():
    """The kernels used throughout the experiment presets.

    Order 1/2 at scale 1, order 3/2 at scale 2, order 5/2 at scale 1 and
    the unit Gaussian; the first two normalizations match the experiment
    presets exactly.
    """
    return (
        make_matern(0.5, 1.0),
        make_matern(1.5, 2.0),
        make_matern(2.5, 1.0),
        make_gaussian(1.0),
    )


def _parse_nu(text):
    if "/" in text:
        num, _, den = text.partition("/")
        return float(num) / float(den)
    return float(text)


def parse_kernel_spec(text):
    """Parse a kernel spec string.

    Accepted forms (dot-decimal, locale independent):

    * ``matern:<nu>[:<scale>]`` -- half-integer kernel, e.g. ``matern:0.5``
      or ``matern:1.5:2``; ``<nu>`` may also be a fraction like ``1/2``.
    * ``gauss[:<scale>]`` -- Gaussian kernel.
    * ``asymptotic:<D>:<gamma>[:log]`` -- classification-only asymptotic
      data with no pointwise evaluator.

    Returns a :class:`RadialKernel` or, for the last form, a bare
    :class:`AsymptoticData`.
    """
    parts = [p.strip() for p in text.strip().split(":")]
    if not parts or not parts[0]:
        raise ValueError(f"empty kernel spec {text!r}")
    head, args = parts[0].lower(), parts[1:]
    try:
        if head == "matern":
            if len(args) not in (1, 2):
                raise ValueError("matern spec takes matern:<nu>[:<scale>]")
            nu = _parse_nu(args[0])
            scale = float(args[1]) if len(args) == 2 else 1.0
            return make_matern(nu, scale)
        if head == "gauss":
            if len(args) > 1:
                raise ValueError("gauss spec takes gauss[:<scale>]")
            scale = float(args[0]) if args else 1.0
            return make_gaussian(scale)
        if head == "asymptotic":
            if len(args) == 3 and args[2].lower() == "log":
                return AsymptoticData(float(args[0]), float(args[1]), True)
            if len(args) == 2:
                return AsymptoticData(float(args[0]), float(args[1]), False)
            raise ValueError("asymptotic spec takes asymptotic:<D>:<gamma>[:log]")
    except ValueError as exc:
        raise ValueError(f"bad kernel spec {text!r}: {exc}") from None
    raise ValueError(f"bad kernel spec {text!r}: unknown family {head!r}")
