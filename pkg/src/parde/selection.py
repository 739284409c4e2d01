"""Base-index selection: one base row ``r0[i]`` for every target row ``i``.

``rng`` is always the generation-level stream; row-keyed draws are split from
it internally.
"""

from __future__ import annotations

import math

import numpy as np

from . import rng as _rng
from .core import SelectionKind
from .rng import RngStream

__all__ = [
    "select_random",
    "select_random_offset",
    "select_permutation",
    "random_base_index",
    "fisher_yates",
    "select",
]


def random_base_index(i: int, np_: int, rng: RngStream) -> int:
    """Scalar form of :func:`select_random` for row ``i``."""
    return rng.row(i).purpose(_rng.BASE).integer_at(0, np_)


def select_random(np_: int, rng: RngStream) -> np.ndarray:
    """Each entry independently uniform on ``{0, ..., np-1}``."""
    if np_ < 1:
        raise ValueError("np must be >= 1")
    keys = _rng.row_keys(rng, np.arange(np_), _rng.BASE)
    return _rng.integers_at(keys, 0, np_)


def select_random_offset(np_: int, rng: RngStream) -> np.ndarray:
    """Rotate the identity by one offset ``r_g = ceil((np-1) * u)``.

    ``u`` lies strictly inside (0, 1), so ``r_g`` is in ``{1, ..., np-1}`` and
    no row is its own base.
    """
    if np_ < 2:
        raise ValueError("np must be >= 2 for offset selection")
    u = rng.purpose(_rng.OFFSET).uniform_at(0)
    offset = math.ceil((np_ - 1) * u)
    return (np.arange(np_) + offset) % np_


def fisher_yates(n: int, stream: RngStream) -> np.ndarray:
    """Uniform permutation of ``0..n-1``; swap ``k`` uses counter ``n-1-k``."""
    perm = np.arange(n)
    if n < 2:
        return perm
    ks = np.arange(n - 1, 0, -1)
    picks = _rng.integers_at(np.uint64(stream.key), np.arange(n - 1), ks + 1).tolist()
    out = perm.tolist()
    for k, j in zip(ks.tolist(), picks):
        out[k], out[j] = out[j], out[k]
    return np.asarray(out, dtype=np.int64)


def select_permutation(np_: int, rng: RngStream) -> np.ndarray:
    if np_ < 1:
        raise ValueError("np must be >= 1")
    return fisher_yates(np_, rng.purpose(_rng.PERM))


_SELECTORS = {
    SelectionKind.RANDOM: select_random,
    SelectionKind.RANDOM_OFFSET: select_random_offset,
    SelectionKind.PERMUTATION: select_permutation,
}


def select(kind: SelectionKind, np_: int, rng: RngStream) -> np.ndarray:
    return _SELECTORS[SelectionKind(kind)](np_, rng)
