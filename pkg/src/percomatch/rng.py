"""Reproducible randomness: hash-derived child seeds and the splitmix64 stream.

Every stochastic routine takes a ``numpy.random.Generator``. Sequential hot
loops (graph generation, PGM frontier draws) run inside numba, where numpy
Generators are unavailable, so they use a splitmix64 stream whose seed is
drawn once from the caller's Generator. The Python implementation below is
bit-compatible with the numba one in ``kernels.py``; a test asserts this.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return state, z


def stream_seed(rng: np.random.Generator) -> int:
    """Draw one 64-bit seed for an internal splitmix64 stream."""
    return int(rng.integers(0, 1 << 64, dtype=np.uint64))


def child_seed(master_seed: int, *parts) -> int:
    """Stable 63-bit seed derived from a master seed and labels.

    Used by the experiment runner to give every (point, run) its own
    independent stream: seed = hash(master_seed, point_key, run_index).
    """
    text = "|".join([str(master_seed)] + [str(p) for p in parts])
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def generator_for(master_seed: int, *parts) -> np.random.Generator:
    """Generator seeded from child_seed(master_seed, *parts)."""
    return np.random.default_rng(child_seed(master_seed, *parts))
