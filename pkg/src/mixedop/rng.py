"""Deterministic counter-based random streams.

Every random draw in the package is addressed by an explicit
``(seed, *path)`` tuple mapped onto an independent Philox stream, so
results never depend on evaluation order or on how work is scheduled
across atoms, samples, or optimizer starts.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# path tags keeping unrelated draw sites on disjoint streams
ORACLE_TAG = 1
SECTION_TAG = 2
START_TAG = 3
GENERATOR_TAG = 4


def _mix(z: int) -> int:
    """splitmix64 finalizer; bijective on 64-bit words."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for the stream addressed by ``(seed, *path)``.

    The path (e.g. atom index, sample block) is folded into the Philox
    key, so distinct paths give statistically independent streams and a
    stream never shifts when sibling streams consume more or fewer
    draws.
    """
    h = _mix(len(path))
    for part in path:
        h = _mix(h ^ _mix(int(part) & _MASK64))
    key = np.array([int(seed) & _MASK64, h], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
