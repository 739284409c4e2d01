"""Counter-based random streams.

Every draw is a pure function of a 64-bit stream key and an integer counter,
so a stream can be split by (generation, row, purpose) without any shared
state. The same draws are available one at a time through :class:`RngStream`
(pure Python integers) and in bulk through the ``*_at`` functions (numpy
``uint64`` arrays); both paths produce identical bits.

The mixing function is the SplitMix64 finalizer. Stream ``k`` emits
``mix(k + (c + 1) * GOLDEN)`` for counter ``c``.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "RngStream",
    "split_stream",
    "bits_at",
    "uniform_at",
    "integers_at",
    "fold_keys",
    "row_keys",
    "INIT",
    "SHUFFLE",
    "OFFSET",
    "PERM",
    "BASE",
    "JRAND",
    "CROSS",
    "MUT",
]

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB
_SALT = 0x5851F42D4C957F2D
# Purpose tags live above every possible row index.
_PURPOSE_BIT = 1 << 63
_TWO_M52 = 2.0**-52

# Generation-level purposes.
INIT = 1
SHUFFLE = 2
OFFSET = 3
PERM = 4
# Row-level purposes.
BASE = 5
JRAND = 6
CROSS = 7
MUT = 8

# Precomputed (tag + 1) * GOLDEN for every purpose tag.
_PURPOSE_ADD = {p: ((_PURPOSE_BIT | p) + 1) * GOLDEN for p in range(1, 9)}

_U_GOLDEN = np.uint64(GOLDEN)
_U_MUL1 = np.uint64(_MUL1)
_U_MUL2 = np.uint64(_MUL2)
_U_SALT = np.uint64(_SALT)
_U_ONE = np.uint64(1)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S12 = np.uint64(12)


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _U_MUL1
    z = (z ^ (z >> _S27)) * _U_MUL2
    return z ^ (z >> _S31)


def _fold(key: int, tag: int) -> int:
    z = ((key ^ _SALT) + (tag + 1) * GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def fold_keys(keys, tags) -> np.ndarray:
    """Child keys for every (key, tag) pair, broadcasting like numpy."""
    keys = np.asarray(keys, dtype=np.uint64)
    tags = np.asarray(tags, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix_array((keys ^ _U_SALT) + (tags + _U_ONE) * _U_GOLDEN)


def bits_at(keys, counters) -> np.ndarray:
    """Raw 64-bit outputs of streams ``keys`` at positions ``counters``."""
    keys = np.asarray(keys, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix_array(keys + (counters + _U_ONE) * _U_GOLDEN)


def _to_unit(bits: np.ndarray) -> np.ndarray:
    # (k + 0.5) / 2**52 with k < 2**52 is exact and strictly inside (0, 1).
    return ((bits >> _S12).astype(np.float64) + 0.5) * _TWO_M52


def uniform_at(keys, counters) -> np.ndarray:
    """Uniform reals on the open interval (0, 1)."""
    return _to_unit(bits_at(keys, counters))


def integers_at(keys, counters, n) -> np.ndarray:
    """Uniform integers on ``[0, n)`` as int64 (modulo reduction, bias < n / 2**64)."""
    return (bits_at(keys, counters) % np.asarray(n, dtype=np.uint64)).astype(np.int64)


def row_keys(stream: "RngStream", rows, purpose: int | None = None) -> np.ndarray:
    """Keys of ``stream.row(r)`` (optionally ``.purpose(purpose)``) for each ``r``."""
    keys = fold_keys(np.uint64(stream.key), np.asarray(rows, dtype=np.uint64))
    if purpose is not None:
        keys = fold_keys(keys, np.uint64(_PURPOSE_BIT | purpose))
    return keys


class RngStream:
    """A keyed random stream with a read cursor.

    Children derived with :meth:`generation`, :meth:`row` and :meth:`purpose`
    are fresh objects with their cursor at zero, so streams never share
    mutable state and can be handed to different threads.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit seed.
    """

    __slots__ = ("key", "_pos")

    def __init__(self, seed: int = 0):
        seed = int(seed)
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.key = _mix((seed + GOLDEN) & MASK64)
        self._pos = 0

    def child(self, tag: int) -> "RngStream":
        obj = _new(RngStream)
        obj.key = _fold(self.key, tag)
        obj._pos = 0
        return obj

    def generation(self, g: int) -> "RngStream":
        return self.child(g)

    def row(self, i: int) -> "RngStream":
        return self.child(i)

    def purpose(self, p: int) -> "RngStream":
        z = ((self.key ^ _SALT) + _PURPOSE_ADD[p]) & MASK64
        z = ((z ^ (z >> 30)) * _MUL1) & MASK64
        z = ((z ^ (z >> 27)) * _MUL2) & MASK64
        obj = _new(RngStream)
        obj.key = z ^ (z >> 31)
        obj._pos = 0
        return obj

    def bits_at(self, counter: int) -> int:
        return _mix((self.key + (counter + 1) * GOLDEN) & MASK64)

    def uniform_at(self, counter: int) -> float:
        return ((_mix((self.key + (counter + 1) * GOLDEN) & MASK64) >> 12) + 0.5) * _TWO_M52

    def integer_at(self, counter: int, n: int) -> int:
        return _mix((self.key + (counter + 1) * GOLDEN) & MASK64) % n

    def uniform(self) -> float:
        """Next uniform real on (0, 1); advances the cursor."""
        u = ((_mix((self.key + (self._pos + 1) * GOLDEN) & MASK64) >> 12) + 0.5) * _TWO_M52
        self._pos += 1
        return u

    def integers(self, n: int) -> int:
        """Next uniform integer on ``[0, n)``; advances the cursor."""
        value = self.bits_at(self._pos) % n
        self._pos += 1
        return value

    def uniforms(self, k: int) -> np.ndarray:
        """Next ``k`` uniforms as an array; advances the cursor by ``k``."""
        out = uniform_at(np.uint64(self.key), np.arange(self._pos, self._pos + k, dtype=np.uint64))
        self._pos += k
        return out

    def __repr__(self) -> str:
        return f"RngStream(key=0x{self.key:016x}, pos={self._pos})"


_new = object.__new__


def split_stream(rng: RngStream, generation: int, row: int) -> RngStream:
    """Substream keyed by (seed, generation, row)."""
    return rng.generation(generation).row(row)
