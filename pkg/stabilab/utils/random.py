"""
Seeded generators.

Every simulation owns a ``numpy.random.Generator`` backed by PCG64, a 64-bit
permuted congruential generator. Same seed, same draws, within one numpy
release.
"""
import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))
