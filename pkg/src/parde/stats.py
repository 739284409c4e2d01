"""Statistical checks of the segment-length law.

Goodness of fit against :class:`~parde.variation.GeometricLaw` and a
two-sample homogeneity test between the looped exponential crossover and the
sampled-length crossover. Sparse cells are pooled with their neighbours so
every pooled cell has an expected count of at least five.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps

from . import variation
from .rng import RngStream
from .variation import GeometricLaw

__all__ = [
    "Histogram",
    "chi_square_gof",
    "chi_square_homogeneity",
    "compare_crossover_lengths",
    "pool_cells",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1
MIN_EXPECTED = 5.0


@dataclass
class Histogram:
    """Counts of segment lengths ``L = 1..d`` (``counts[n - 1]``)."""

    counts: np.ndarray
    total: int

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if int(self.counts.sum()) != int(self.total):
            raise ValueError("histogram counts do not sum to total")

    @classmethod
    def from_lengths(cls, lengths, d: int) -> "Histogram":
        lengths = np.asarray(lengths)
        if lengths.size and (lengths.min() < 1 or lengths.max() > d):
            raise ValueError(f"lengths must lie in [1, {d}]")
        counts = np.bincount(lengths - 1, minlength=d)
        return cls(counts, int(lengths.size))

    @property
    def d(self) -> int:
        return len(self.counts)

    def frequencies(self) -> np.ndarray:
        return self.counts / self.total

    def to_record(self, label: str, params: dict | None = None) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "label": label,
            "params": dict(params or {}),
            "samples": self.counts.tolist(),
            "summary": {
                "total": int(self.total),
                "mean_length": float(np.dot(np.arange(1, self.d + 1), self.counts) / self.total),
            },
        }


def pool_cells(expected: np.ndarray, minimum: float = MIN_EXPECTED) -> list[np.ndarray]:
    """Group adjacent cells so each group's expected count reaches ``minimum``.

    Cells are swept from ``L = 1`` upwards; a short remainder at the tail is
    merged into the last complete group.
    """
    groups: list[list[int]] = []
    current: list[int] = []
    acc = 0.0
    for k, e in enumerate(expected):
        current.append(k)
        acc += e
        if acc >= minimum:
            groups.append(current)
            current, acc = [], 0.0
    if current:
        if groups:
            groups[-1].extend(current)
        else:
            groups.append(current)
    return [np.asarray(g) for g in groups]


def chi_square_gof(observed: Histogram, expected: GeometricLaw) -> tuple[float, float]:
    """Pearson statistic and p-value of ``observed`` against the truncated law.

    Raises
    ------
    ValueError
        If the sample has fewer than ``10 * d`` draws or the dimensions differ.
    """
    if observed.d != expected.d:
        raise ValueError(f"histogram has d={observed.d}, law has d={expected.d}")
    if observed.total < 10 * expected.d:
        raise ValueError(f"need at least {10 * expected.d} samples, got {observed.total}")
    pmf = expected.pmf()
    if np.any(observed.counts[pmf == 0.0] > 0):
        return float("inf"), 0.0
    groups = pool_cells(pmf * observed.total)
    obs = np.array([observed.counts[g].sum() for g in groups], dtype=float)
    exp = np.array([pmf[g].sum() for g in groups]) * observed.total
    if len(groups) < 2:
        return 0.0, 1.0
    statistic = float(np.sum((obs - exp) ** 2 / exp))
    return statistic, float(_sps.chi2.sf(statistic, len(groups) - 1))


def chi_square_homogeneity(a: Histogram, b: Histogram) -> tuple[float, float]:
    """Two-sample chi-square test that ``a`` and ``b`` share one distribution."""
    if a.d != b.d:
        raise ValueError("histograms have different supports")
    table = np.vstack([a.counts, b.counts]).astype(float)
    n = table.sum()
    col = table.sum(axis=0)
    # Smallest expected cell of a column is col * min(row share).
    share = table.sum(axis=1).min() / n
    groups = pool_cells(col * share)
    pooled = np.column_stack([table[:, g].sum(axis=1) for g in groups])
    pooled = pooled[:, pooled.sum(axis=0) > 0]
    if pooled.shape[1] < 2:
        return 0.0, 1.0
    statistic, p_value, _, _ = _sps.chi2_contingency(pooled, correction=False)
    return float(statistic), float(p_value)


def compare_crossover_lengths(cr: float, d: int, n_samples: int, rng: RngStream):
    """Segment-length histograms of the looped and the sampled crossover.

    The looped lengths come from the exponential loop's continuation draws
    (generation 0 of ``rng``), the sampled lengths from the inverse-CDF
    sampler (generation 1). Returns ``(hist_exp, hist_nec, p_value)`` where the
    p-value is from the two-sample homogeneity test.
    """
    if n_samples < 10_000:
        raise ValueError("n_samples must be >= 10000")
    exp_lengths = variation.exponential_lengths_batch(cr, d, n_samples, rng.generation(0))
    nec_lengths = variation.sample_lengths_batch(cr, d, n_samples, rng.generation(1))
    hist_exp = Histogram.from_lengths(exp_lengths, d)
    hist_nec = Histogram.from_lengths(nec_lengths, d)
    _, p_value = chi_square_homogeneity(hist_exp, hist_nec)
    return hist_exp, hist_nec, p_value
