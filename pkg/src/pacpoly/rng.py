"""Reproducible random numbers: xoshiro256** seeded through SplitMix64.

The sampling contract of this package is pinned to a concrete generator so
that a (seed, count) pair identifies the same sample set everywhere:

* state: four 64-bit words, filled by four successive outputs of SplitMix64
  initialised with the user seed;
* output: ``rotl(s1 * 5, 7) * 9`` followed by the standard xoshiro256**
  state transition;
* doubles: ``(next() >> 11) * 2**-53``, uniform on [0, 1).

Large Monte Carlo estimates use many parallel streams advanced in lockstep
(stream ``i`` is an independent generator seeded with ``seed + i`` modulo
2**64); the point layout is documented in :func:`uniform_block`.
"""

from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_DOUBLE_SCALE = 2.0 ** -53


def _splitmix64_next(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def _seed_state(seed: int) -> list[int]:
    sm = seed & _MASK
    out = []
    for _ in range(4):
        sm, z = _splitmix64_next(sm)
        out.append(z)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256StarStar:
    """Scalar xoshiro256** stream; the canonical sample-drawing generator."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        self._s = _seed_state(seed)

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def next_double(self) -> float:
        return (self.next_u64() >> 11) * _DOUBLE_SCALE

    def doubles(self, count: int) -> np.ndarray:
        return np.array([self.next_double() for _ in range(count)], dtype=float)


def _seed_states_vec(seed: int, n_streams: int) -> list[np.ndarray]:
    """SplitMix64 expansion of seeds seed, seed+1, ... as uint64 vectors."""
    sm = (np.uint64(seed & _MASK) + np.arange(n_streams, dtype=np.uint64)) & np.uint64(_MASK)
    states = []
    with np.errstate(over="ignore"):
        for _ in range(4):
            sm = sm + np.uint64(0x9E3779B97F4A7C15)
            z = sm.copy()
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            states.append(z ^ (z >> np.uint64(31)))
    return states


def _rotl_vec(x: np.ndarray, k: int) -> np.ndarray:
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


class XoshiroStreams:
    """Many xoshiro256** streams advanced in lockstep (vectorised in numpy)."""

    def __init__(self, seed: int, n_streams: int):
        self.seed = seed & _MASK
        self.n_streams = n_streams
        self._s = _seed_states_vec(seed, n_streams)

    def next_u64(self) -> np.ndarray:
        s = self._s
        with np.errstate(over="ignore"):
            result = _rotl_vec(s[1] * np.uint64(5), 7) * np.uint64(9)
            t = s[1] << np.uint64(17)
            s[2] ^= s[0]
            s[3] ^= s[1]
            s[1] ^= s[2]
            s[0] ^= s[3]
            s[2] ^= t
            s[3] = _rotl_vec(s[3], 45)
        return result

    def doubles(self, count_per_stream: int) -> np.ndarray:
        """(n_streams, count) matrix; row i is stream i's next values in order."""
        out = np.empty((self.n_streams, count_per_stream), dtype=float)
        for j in range(count_per_stream):
            out[:, j] = (self.next_u64() >> np.uint64(11)).astype(float) * _DOUBLE_SCALE
        return out


def uniform_block(seed: int, n_points: int, dim: int, n_streams: int = 256) -> np.ndarray:
    """(n_points, dim) uniform [0,1) matrix for bulk Monte Carlo estimates.

    Points are split into ``n_streams`` contiguous chunks; chunk ``i`` takes
    its coordinates, in point-then-coordinate order, from the stream seeded
    with ``seed + i``.  The layout is fixed, so the matrix depends only on
    (seed, n_points, dim, n_streams).
    """
    if n_points <= 0:
        raise ValueError("n_points must be positive")
    n_streams = min(n_streams, n_points)
    per_chunk = -(-n_points // n_streams)
    gen = XoshiroStreams(seed, n_streams)
    flat = gen.doubles(per_chunk * dim)
    points = flat.reshape(n_streams * per_chunk, dim)
    return points[:n_points]
