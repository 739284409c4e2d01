"""Crossover masks, sequential crossover references and masked DE/rand/1 mutation.

Randomness layout (all under the generation stream ``rng``, row ``i``):

* ``rng.row(i).purpose(JRAND)`` counter 0 -- segment start / forced gene.
* ``rng.row(i).purpose(CROSS)`` -- binomial gene ``j`` uses counter ``j``; the
  exponential loop reads counters 0, 1, ... as continuation draws; the sampled
  segment length reads counter 0.
* ``rng.row(i).purpose(MUT)`` -- counter 0 replaces a base equal to ``i``,
  attempt ``k`` of the donor draw reads counters ``1 + 2k`` and ``2 + 2k``.

Row-loop and whole-matrix builders read the same counters, so they agree
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import rng as _rng
from .core import ConfigError, CrossoverKind, CrossoverMask, Population, TrialBatch
from .rng import RngStream

__all__ = [
    "GeometricLaw",
    "sample_length",
    "sample_lengths",
    "sample_lengths_batch",
    "binomial_mask",
    "binomial_crossover",
    "exponential_crossover_oracle",
    "exponential_lengths_batch",
    "nec_sequential",
    "nec_parallel_mask",
    "donors_for_row",
    "donor_indices",
    "masked_mutation",
    "crossover_row",
    "build_mask",
    "mask_rows",
    "mutate_rows",
]

_MAX_DONOR_ATTEMPTS = 10_000


@dataclass(frozen=True)
class GeometricLaw:
    """Segment-length law of the exponential crossover, truncated at ``d``.

    ``P{L = n} = cr**(n-1) * (1 - cr)`` for ``1 <= n < d`` and the remaining
    mass ``cr**(d-1)`` sits at ``n = d``.
    """

    cr: float
    d: int

    def __post_init__(self):
        if not 0.0 <= self.cr <= 1.0:
            raise ValueError(f"cr must lie in [0, 1], got {self.cr}")
        if self.d < 1:
            raise ValueError("d must be >= 1")

    def pmf(self) -> np.ndarray:
        """Probabilities for ``L = 1..d`` (index ``n - 1``)."""
        n = np.arange(1, self.d + 1)
        p = self.cr ** (n - 1) * (1.0 - self.cr)
        p[-1] = self.cr ** (self.d - 1)
        return p

    def cdf(self) -> np.ndarray:
        """``P{L <= n} = 1 - cr**n`` for ``n < d``, and 1 at ``n = d``."""
        n = np.arange(1, self.d + 1)
        c = 1.0 - self.cr**n
        c[-1] = 1.0
        return c

    def mean(self) -> float:
        return float(np.dot(np.arange(1, self.d + 1), self.pmf()))


# Ratios this close to an integer are recomputed with math.log so that the
# batch path rounds exactly like the scalar path (np.log may differ by an ulp).
_NEAR_INTEGER = 1e-12


@lru_cache(maxsize=64)
def _log_cr(cr: float) -> float:
    return math.log(cr)


def sample_length(cr: float, d: int, u: float) -> int:
    """Segment length from one uniform draw by inverting the geometric CDF.

    ``1`` if ``cr == 0``, ``d`` if ``cr == 1``, otherwise
    ``clip(ceil(ln u / ln cr), 1, d)``.
    """
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must lie strictly inside (0, 1), got {u}")
    if cr == 0.0:
        return 1
    if cr == 1.0:
        return d
    length = math.ceil(math.log(u) / _log_cr(cr))
    return 1 if length < 1 else (d if length > d else length)


def sample_lengths(cr: float, d: int, u) -> np.ndarray:
    """Vectorised :func:`sample_length` over an array of uniforms."""
    u = np.asarray(u, dtype=np.float64)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise ValueError("u must lie strictly inside (0, 1)")
    if cr == 0.0:
        return np.ones(u.shape, dtype=np.int64)
    if cr == 1.0:
        return np.full(u.shape, d, dtype=np.int64)
    log_cr = _log_cr(float(cr))
    x = np.log(u) / log_cr
    near = np.abs(x - np.rint(x)) <= _NEAR_INTEGER * x
    if near.any():
        x[near] = [math.log(v) / log_cr for v in u[near].tolist()]
    return np.clip(np.ceil(x), 1, d).astype(np.int64)


def _check_cr(cr):
    if not 0.0 <= cr <= 1.0:
        raise ValueError(f"cr must lie in [0, 1], got {cr}")


def _length_rows(cr, d, rng, rows):
    keys = _rng.row_keys(rng, rows, _rng.CROSS)
    return sample_lengths(cr, d, _rng.uniform_at(keys, 0))


def sample_lengths_batch(cr: float, d: int, np_: int, rng: RngStream) -> np.ndarray:
    """One segment length per row, each from its own row substream."""
    _check_cr(cr)
    return _length_rows(cr, d, rng, np.arange(np_))


def _binomial_rows(cr, d, rng, rows):
    cross = _rng.row_keys(rng, rows, _rng.CROSS)
    jrand = _rng.integers_at(_rng.row_keys(rng, rows, _rng.JRAND), 0, d)
    bits = _rng.uniform_at(cross[:, None], np.arange(d, dtype=np.uint64)[None, :]) < cr
    bits[np.arange(len(rows)), jrand] = True
    return bits


def binomial_mask(cr: float, np_: int, d: int, rng: RngStream) -> CrossoverMask:
    """Gene ``(i, j)`` crosses iff ``j == jrand[i]`` or its uniform is below ``cr``."""
    _check_cr(cr)
    return CrossoverMask(_binomial_rows(cr, d, rng, np.arange(np_)))


def binomial_crossover(parent_row, mutant_row, cr: float, rng: RngStream) -> np.ndarray:
    """Binomial crossover of one row; ``rng`` is that row's substream."""
    parent_row = np.asarray(parent_row)
    d = parent_row.shape[0]
    jrand = rng.purpose(_rng.JRAND).integer_at(0, d)
    take = rng.purpose(_rng.CROSS).uniforms(d) < cr
    take[jrand] = True
    return np.where(take, mutant_row, parent_row)


def exponential_crossover_oracle(parent_row, mutant_row, cr: float, rng: RngStream) -> np.ndarray:
    """Classic exponential crossover: copy genes while a fresh draw stays below ``cr``.

    Starts at a random gene and walks forward modulo ``d``; at least one gene
    and at most ``d`` genes are copied. ``rng`` is the row substream.
    """
    trial = parent_row.copy()
    d = trial.shape[0]
    j = rng.purpose(_rng.JRAND).integer_at(0, d)
    cont = rng.purpose(_rng.CROSS)
    length = 0
    while True:
        trial[j] = mutant_row[j]
        j = (j + 1) % d
        length += 1
        if not (cont.uniform() < cr and length < d):
            break
    return trial


def exponential_lengths_batch(cr: float, d: int, np_: int, rng: RngStream) -> np.ndarray:
    """Copied-segment lengths the exponential loop would produce for each row.

    Reads the same continuation counters as :func:`exponential_crossover_oracle`,
    all at once: the length is one plus the index of the first draw ``>= cr``
    among the first ``d - 1`` draws, or ``d`` if there is none.
    """
    _check_cr(cr)
    if d == 1:
        return np.ones(np_, dtype=np.int64)
    keys = _rng.row_keys(rng, np.arange(np_), _rng.CROSS)
    stops = _rng.uniform_at(keys[:, None], np.arange(d - 1, dtype=np.uint64)[None, :]) >= cr
    first = np.argmax(stops, axis=1)
    return np.where(stops[np.arange(np_), first], first + 1, d).astype(np.int64)


def nec_sequential(parent_row, mutant_row, cr: float, rng: RngStream) -> np.ndarray:
    """Exponential crossover with the segment length drawn up front."""
    trial = parent_row.copy()
    d = trial.shape[0]
    start = rng.purpose(_rng.JRAND).integer_at(0, d)
    length = sample_length(cr, d, rng.purpose(_rng.CROSS).uniform_at(0))
    end = start + length
    if end <= d:
        trial[start:end] = mutant_row[start:end]
    else:
        trial[start:] = mutant_row[start:]
        trial[: end - d] = mutant_row[: end - d]
    return trial


def _index_dtype(limit: int):
    # Narrow index types make the whole-matrix comparisons several times cheaper.
    for dtype in (np.int16, np.int32):
        if limit <= np.iinfo(dtype).max:
            return dtype
    return np.int64


def _nec_rows(cr, d, rng, rows):
    dtype = _index_dtype(2 * d)
    start = _rng.integers_at(_rng.row_keys(rng, rows, _rng.JRAND), 0, d).astype(dtype)[:, None]
    end = start + _length_rows(cr, d, rng, rows).astype(dtype)[:, None]
    seq = np.arange(d, dtype=dtype)[None, :]
    bits = (start <= seq) ^ (end <= seq)
    wrap = end[:, 0] > d
    if wrap.any():
        bits[wrap] = (start[wrap] <= seq) | (seq < end[wrap] - d)
    return bits


def nec_parallel_mask(cr: float, np_: int, d: int, rng: RngStream) -> CrossoverMask:
    """Whole-matrix mask of modular segments ``[jrand, jrand + L)``.

    Non-wrapping rows use ``(jrand <= seq) XOR (jrand + L <= seq)``; rows
    whose segment passes column ``d - 1`` use
    ``(seq >= jrand) OR (seq < jrand + L - d)``.
    """
    _check_cr(cr)
    return CrossoverMask(_nec_rows(cr, d, rng, np.arange(np_)))


def _oracle_rows(oracle, cr, d, rng, rows):
    off = np.zeros(d, dtype=bool)
    on = np.ones(d, dtype=bool)
    out = np.empty((len(rows), d), dtype=bool)
    for k, r in enumerate(rows.tolist()):
        out[k] = oracle(off, on, cr, rng.row(r))
    return out


def mask_rows(kind: CrossoverKind, cr: float, d: int, rng: RngStream, rows) -> np.ndarray:
    """Mask rows ``rows`` of the generation mask for ``kind`` (boolean block)."""
    _check_cr(cr)
    rows = np.asarray(rows, dtype=np.int64)
    kind = CrossoverKind(kind)
    if kind is CrossoverKind.BINOMIAL:
        return _binomial_rows(cr, d, rng, rows)
    if kind is CrossoverKind.NEC_PARALLEL:
        return _nec_rows(cr, d, rng, rows)
    if kind is CrossoverKind.NEC_SEQUENTIAL:
        return _oracle_rows(nec_sequential, cr, d, rng, rows)
    return _oracle_rows(exponential_crossover_oracle, cr, d, rng, rows)


def build_mask(kind: CrossoverKind, cr: float, np_: int, d: int, rng: RngStream) -> CrossoverMask:
    return CrossoverMask(mask_rows(kind, cr, d, rng, np.arange(np_)))


_ROW_CROSSOVERS = {
    CrossoverKind.BINOMIAL: binomial_crossover,
    CrossoverKind.EXPONENTIAL: exponential_crossover_oracle,
    CrossoverKind.NEC_SEQUENTIAL: nec_sequential,
    CrossoverKind.NEC_PARALLEL: nec_sequential,
}


def crossover_row(kind: CrossoverKind, parent_row, mutant_row, cr: float, rng: RngStream) -> np.ndarray:
    """Recombine one full mutant with its parent (mutation-then-crossover order)."""
    return _ROW_CROSSOVERS[CrossoverKind(kind)](parent_row, mutant_row, cr, rng)


def donors_for_row(i: int, base: int, np_: int, rng: RngStream) -> tuple[int, int, int]:
    """Base and difference indices for row ``i`` with ``{i, r0, r1, r2}`` distinct.

    A base equal to ``i`` is replaced by ``(i + o) % np`` with ``o`` uniform on
    ``{1, ..., np-1}``. Then ``r1 = r0 + o1``, ``r2 = r1 + o2`` (mod np) with
    fresh offsets until the four indices differ.
    """
    if np_ < 4:
        raise ConfigError("DE/rand/1 needs np >= 4")
    mut = rng.purpose(_rng.MUT)
    if base == i:
        base = (i + 1 + mut.integer_at(0, np_ - 1)) % np_
    for attempt in range(_MAX_DONOR_ATTEMPTS):
        r1 = (base + 1 + mut.integer_at(1 + 2 * attempt, np_ - 1)) % np_
        r2 = (r1 + 1 + mut.integer_at(2 + 2 * attempt, np_ - 1)) % np_
        if r1 != i and r2 != i and r2 != base:
            return base, r1, r2
    raise RuntimeError("donor rejection sampling did not terminate")


def donor_indices(r0, rng: RngStream, rows=None, np_: int | None = None):
    """Vectorised :func:`donors_for_row` for ``rows`` (default: all rows).

    Returns ``(r0, r1, r2)`` arrays aligned with ``rows``.
    """
    r0 = np.asarray(r0, dtype=np.int64)
    n = len(r0) if np_ is None else np_
    if n < 4:
        raise ConfigError("DE/rand/1 needs np >= 4")
    rows = np.arange(n) if rows is None else np.asarray(rows, dtype=np.int64)
    keys = _rng.row_keys(rng, rows, _rng.MUT)
    base = r0[rows].copy()
    clash = base == rows
    if clash.any():
        base[clash] = (rows[clash] + 1 + _rng.integers_at(keys[clash], 0, n - 1)) % n
    r1 = np.empty_like(base)
    r2 = np.empty_like(base)
    pending = np.arange(len(rows))
    for attempt in range(_MAX_DONOR_ATTEMPTS):
        k = keys[pending]
        a = (base[pending] + 1 + _rng.integers_at(k, 1 + 2 * attempt, n - 1)) % n
        b = (a + 1 + _rng.integers_at(k, 2 + 2 * attempt, n - 1)) % n
        ok = (a != rows[pending]) & (b != rows[pending]) & (b != base[pending])
        r1[pending[ok]] = a[ok]
        r2[pending[ok]] = b[ok]
        pending = pending[~ok]
        if pending.size == 0:
            return base, r1, r2
    raise RuntimeError("donor rejection sampling did not terminate")


def mutate_rows(genomes: np.ndarray, r0, bits: np.ndarray, f: float, rng: RngStream, rows) -> np.ndarray:
    """Trial rows ``rows``: parent copies with masked genes set to the DE/rand/1 mutant.

    ``bits`` is the mask block for ``rows``. The mutant is evaluated only at
    masked positions.
    """
    rows = np.asarray(rows, dtype=np.int64)
    base, r1, r2 = donor_indices(r0, rng, rows, np_=genomes.shape[0])
    trial = genomes[rows].copy()
    k, j = np.nonzero(bits)
    trial[k, j] = genomes[base[k], j] + f * (genomes[r1[k], j] - genomes[r2[k], j])
    return trial


def masked_mutation(population: Population, r0, mask: CrossoverMask, f: float, rng: RngStream) -> TrialBatch:
    genomes = population.genomes
    if mask.shape != genomes.shape:
        raise ValueError(f"mask shape {mask.shape} != population shape {genomes.shape}")
    if genomes.shape[0] < 4:
        raise ConfigError("DE/rand/1 needs np >= 4")
    rows = np.arange(genomes.shape[0])
    return TrialBatch(mutate_rows(genomes, r0, mask.bits, f, rng, rows))
