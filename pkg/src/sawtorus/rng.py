"""Counter-based SplitMix64 sampling.

Output ``k`` of stream ``seed`` is ``mix(seed + (k + 1) * GOLDEN)`` with all
arithmetic mod 2**64 and

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

Doubles in [0, 1) take the top 53 bits: ``(z >> 11) * 2**-53``.  Because the
k-th draw depends only on (seed, k), any index range can be produced
independently and the concatenation is identical to a single pass.
"""
from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Raw 64-bit outputs ``start .. start + count - 1`` of stream ``seed``."""
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + k * GOLDEN
        z = (z ^ (z >> np.uint64(30))) * MIX1
        z = (z ^ (z >> np.uint64(27))) * MIX2
        z = z ^ (z >> np.uint64(31))
    return z


def uniform(seed: int, count: int, start: int = 0) -> np.ndarray:
    return (splitmix64(seed, start, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def torus_points(seed: int, count: int, start: int = 0) -> np.ndarray:
    """``count`` uniform points of [0, 1)^2 as an array of shape (count, 2).

    Point i uses draws 2i and 2i + 1 of the stream.
    """
    return uniform(seed, 2 * count, 2 * start).reshape(count, 2)


def substream(seed: int, stream_id: int) -> int:
    """Seed of an independent sub-stream, e.g. one per worker range."""
    return int(splitmix64(seed ^ 0x5DEECE66D, int(stream_id), 1)[0])
