"""Scalar kernel profiles shared by the numpy and numba execution paths.

Profiles are addressed by small integer codes so the same branch-free
functions can be compiled with ``numba.njit`` for the hot loops and
applied elementwise to numpy arrays everywhere else.  Only the
half-integer exponential-polynomial family and the squared-exponential
profile are available pointwise.
"""

import numpy as np

MATERN12 = 0
MATERN32 = 1
MATERN52 = 2
MATERN72 = 3
GAUSSIAN = 10

MATERN_CODE_BY_NU = {0.5: MATERN12, 1.5: MATERN32, 2.5: MATERN52, 3.5: MATERN72}

# unscaled profile value at r = 0 and leading small-r gap coefficient/exponent
VALUE_AT_ZERO = {MATERN12: 1.0, MATERN32: 1.0, MATERN52: 3.0, MATERN72: 15.0, GAUSSIAN: 1.0}
GAP_COEFF = {MATERN12: 1.0, MATERN32: 0.5, MATERN52: 0.5, MATERN72: 1.5, GAUSSIAN: 1.0}
GAP_EXPONENT = {MATERN12: 1.0, MATERN32: 2.0, MATERN52: 2.0, MATERN72: 2.0, GAUSSIAN: 2.0}


def profile_value(code, scale, r):
    """k(r); works on scalars and arrays."""
    if code == 0:
        return scale * np.exp(-r)
    elif code == 1:
        return scale * (1.0 + r) * np.exp(-r)
    elif code == 2:
        return scale * (3.0 + (3.0 + r) * r) * np.exp(-r)
    elif code == 3:
        return scale * (15.0 + (15.0 + (6.0 + r) * r) * r) * np.exp(-r)
    else:
        return scale * np.exp(-r * r)


def profile_derivative(code, scale, r):
    """dk/dr; exact closed forms, r > 0."""
    if code == 0:
        return -scale * np.exp(-r)
    elif code == 1:
        return -scale * r * np.exp(-r)
    elif code == 2:
        return -scale * r * (1.0 + r) * np.exp(-r)
    elif code == 3:
        return -scale * r * (3.0 + (3.0 + r) * r) * np.exp(-r)
    else:
        return -2.0 * scale * r * np.exp(-r * r)


def profile_gap(code, scale, r):
    """k(0) - k(r), written so small r does not cancel catastrophically."""
    if code == 0:
        return -scale * np.expm1(-r)
    elif code == 1:
        return scale * (-np.expm1(-r) - r * np.exp(-r))
    elif code == 2:
        return scale * (-3.0 * np.expm1(-r) - r * (3.0 + r) * np.exp(-r))
    elif code == 3:
        return scale * (-15.0 * np.expm1(-r) - r * (15.0 + (6.0 + r) * r) * np.exp(-r))
    else:
        return -scale * np.expm1(-r * r)
