"""Deterministic random streams.

Every random draw in the package comes from a named stream derived from a
single integer seed::

    stream(seed, name) = Generator(Philox(SeedSequence(seed, spawn_key=(crc32(name),))))

Philox is counter-based, and distinct names give statistically independent
streams, so adding a new consumer never perturbs existing ones.
"""

import os
import zlib

import numpy as np
from scipy.stats import qmc

ENV_SEED = "WARPGEO_SEED"
DEFAULT_SEED = 0


def resolve_seed(seed=None):
    """Explicit seed, else $WARPGEO_SEED, else 0."""
    if seed is not None:
        return int(seed)
    env = os.environ.get(ENV_SEED)
    return int(env) if env not in (None, "") else DEFAULT_SEED


def stream(seed, name):
    key = zlib.crc32(name.encode("utf-8"))
    ss = np.random.SeedSequence(int(seed) % 2**64, spawn_key=(key,))
    return np.random.Generator(np.random.Philox(ss))


def sobol(dim, n, seed, name):
    """First `n` points of a scrambled Sobol sequence in ``[0, 1)^dim``."""
    engine = qmc.Sobol(dim, scramble=True, seed=stream(seed, name))
    m = max(0, int(np.ceil(np.log2(max(n, 1)))))
    return engine.random_base2(m)[:n]


def unit_vectors(u):
    """Map ``[0,1)^(d)`` samples to unit vectors in R^d via the inverse normal CDF."""
    from scipy.special import ndtri

    z = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)
