"""Execution backend selection.

The hot Euler-Maruyama loops exist in two implementations: a numba
``@njit`` path (per-path compiled loops) and a pure-numpy path (paths
advanced in lockstep with batched linear algebra).  The environment
variable ``LANDMARKBM_BACKEND`` selects between them:

* unset or ``auto`` -- numba when importable, numpy otherwise,
* ``numba``         -- require numba, fail loudly if missing,
* ``numpy``         -- force the vectorized fallback.

``LANDMARKBM_THREADS`` caps the number of worker threads used for
path-parallel simulation on the numba backend (``0`` means one worker
per CPU).  The numpy backend is vectorized across paths and ignores it.
"""

import os

_NUMBA_OK = None


def _numba_available():
    global _NUMBA_OK
    if _NUMBA_OK is None:
        try:
            import numba  # noqa: F401

            _NUMBA_OK = True
        except ImportError:
            _NUMBA_OK = False
    return _NUMBA_OK


def backend(override=None):
    """Resolve the backend name: ``"numba"`` or ``"numpy"``."""
    choice = override or os.environ.get("LANDMARKBM_BACKEND", "auto") or "auto"
    choice = choice.strip().lower()
    if choice == "auto":
        return "numba" if _numba_available() else "numpy"
    if choice == "numba":
        if not _numba_available():
            raise ImportError(
                "LANDMARKBM_BACKEND=numba but numba is not importable"
            )
        return "numba"
    if choice == "numpy":
        return "numpy"
    raise ValueError(f"unknown backend {choice!r}; expected auto, numba or numpy")


def worker_count(override=None):
    """Number of path-parallel workers (>= 1)."""
    if override is None:
        raw = os.environ.get("LANDMARKBM_THREADS", "1")
    else:
        raw = str(override)
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"bad thread count {raw!r}") from exc
    if n < 0:
        raise ValueError("thread count must be >= 0")
    if n == 0:
        return os.cpu_count() or 1
    return n
