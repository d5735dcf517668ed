"""Counter-based random streams for reproducible Monte Carlo.

Every variate is a pure function of ``(seed, stream, counter, draw)``, so a
walker can evaluate its own randomness independently of batching, execution
order, or worker count.  The construction is a splitmix-style avalanche hash
over the four words; it is statistical-quality, not cryptographic.
"""

from __future__ import annotations

import numpy as np

_U64 = np.uint64
_MASK = (1 << 64) - 1

_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)
_W_COUNTER = _U64(0xE7037ED1A0B428DB)

_INV_2_53 = 1.0 / float(1 << 53)


def _avalanche(x: np.ndarray) -> np.ndarray:
    x = (x ^ (x >> _U64(30))) * _MIX1
    x = (x ^ (x >> _U64(27))) * _MIX2
    return x ^ (x >> _U64(31))


def _avalanche_int(x: int) -> int:
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def hash_words(seed: int, stream: int, counter, draw: int) -> np.ndarray:
    """Hash the four-word counter to uint64; ``counter`` may be an array.

    Scalar words premix in exact Python integers; only the per-counter
    avalanche runs vectorized (numpy warns on 0-d integer overflow, and
    unsigned wraparound is the intended behaviour here).
    """
    c = np.atleast_1d(np.asarray(counter, dtype=np.uint64))
    h = (int(seed & _MASK) * 0x9E3779B97F4A7C15
         + int(stream & _MASK) * 0xA0761D6478BD642F
         + int(draw & _MASK) * 0x8EBC6AF09C88C6E3) & _MASK
    h = _avalanche_int(h)
    out = _avalanche(_U64(h) + c * _W_COUNTER)
    return out if np.ndim(counter) else out.reshape(())


def uniforms(seed: int, stream: int, counter, draw: int) -> np.ndarray:
    """Uniform float64 in [0, 1), one value per entry of ``counter``."""
    return (hash_words(seed, stream, counter, draw) >> _U64(11)) * _INV_2_53


def uniform(seed: int, stream: int, counter: int, draw: int) -> float:
    return float(uniforms(seed, stream, np.asarray(counter, dtype=np.uint64), draw))


def choice_indices(seed: int, stream: int, counter, draw: int, n: int) -> np.ndarray:
    """Deterministic indices in [0, n), one per counter entry."""
    u = uniforms(seed, stream, counter, draw)
    idx = np.minimum((u * n).astype(np.int64), n - 1)
    return idx


def standard_points(seed: int, stream: int, n: int, radius: float = 1.0,
                    center: complex = 0j) -> np.ndarray:
    """n deterministic pseudo-random points in the disc D(center, radius)."""
    ids = np.arange(n, dtype=np.uint64)
    u = uniforms(seed, stream, ids, 0)
    v = uniforms(seed, stream, ids, 1)
    r = radius * np.sqrt(u)
    theta = 2.0 * np.pi * v
    return center + r * np.exp(1j * theta)
