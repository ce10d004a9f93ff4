"""Counter-based per-path noise streams.

Each sample path draws its Gaussian increments from a Philox generator
keyed by ``(master seed, path index)``.  Philox is counter-based, so a
path's stream depends only on its key and position: ensembles are
bitwise reproducible regardless of execution order, worker count, or
how many other paths run alongside.
"""

import numpy as np

__all__ = ["path_generator", "path_normals"]


def path_generator(master_seed, path_index):
    """Philox generator dedicated to one sample path."""
    master_seed = int(master_seed)
    path_index = int(path_index)
    if master_seed < 0 or path_index < 0:
        raise ValueError("seed and path index must be nonnegative")
    key = ((master_seed & 0xFFFFFFFFFFFFFFFF) << 64) | (path_index & 0xFFFFFFFFFFFFFFFF)
    return np.random.Generator(np.random.Philox(key=key))


def path_normals(master_seed, path_index, shape):
    """Standard-normal increments for one path, shape ``shape``."""
    return path_generator(master_seed, path_index).standard_normal(shape)
