"""Benchmark objectives (Ackley, Griewank, Rosenbrock) with batch evaluation.

Each function accepts an array of shape ``(..., D)`` and reduces over the last
axis, so a single genome and a whole population go through the same code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ConfigError

__all__ = [
    "Objective",
    "ackley",
    "griewank",
    "rosenbrock",
    "evaluate_batch",
    "get_objective",
    "OBJECTIVES",
]


def ackley(x):
    """Ackley function with the 0.02 exponent coefficient; minimum 0 at the origin."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    return (
        -20.0 * np.exp(-0.02 * np.sqrt(np.sum(x**2, axis=-1) / d))
        - np.exp(np.sum(np.cos(2.0 * np.pi * x), axis=-1) / d)
        + 20.0
        + np.e
    )


def griewank(x):
    x = np.asarray(x, dtype=float)
    j = np.arange(1, x.shape[-1] + 1)
    return np.sum(x**2, axis=-1) / 4000.0 - np.prod(np.cos(x / np.sqrt(j)), axis=-1) + 1.0


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] < 2:
        raise ConfigError("rosenbrock needs d >= 2")
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (head**2 - tail) ** 2 + (1.0 - head) ** 2, axis=-1)


@dataclass(frozen=True)
class Objective:
    """A box-bounded objective of fixed dimension.

    ``function`` maps ``(..., d)`` arrays to ``(...)`` values. ``optimum`` is a
    callable returning the known minimiser for dimension ``d``.
    """

    name: str
    d: int
    lower: float
    upper: float
    function: Callable[[np.ndarray], np.ndarray]
    optimum: Callable[[int], np.ndarray] | None = None
    optimum_value: float | None = None

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.full(self.d, self.lower), np.full(self.d, self.upper)

    @property
    def known_optimum(self) -> tuple[np.ndarray, float] | None:
        if self.optimum is None:
            return None
        return self.optimum(self.d), self.optimum_value

    def evaluate_row(self, genome) -> float:
        genome = np.asarray(genome, dtype=float)
        if genome.shape != (self.d,):
            raise ValueError(f"{self.name}: expected a genome of length {self.d}, got shape {genome.shape}")
        return float(self.function(genome[np.newaxis, :])[0])

    def evaluate_batch(self, genomes) -> np.ndarray:
        genomes = np.asarray(genomes, dtype=float)
        if genomes.ndim != 2 or genomes.shape[1] != self.d:
            raise ValueError(f"{self.name}: expected an (n, {self.d}) matrix, got shape {genomes.shape}")
        return np.asarray(self.function(genomes), dtype=float)


def evaluate_batch(objective: Objective, genomes) -> np.ndarray:
    return objective.evaluate_batch(genomes)


OBJECTIVES = {
    "ackley": dict(function=ackley, lower=-30.0, upper=30.0, optimum=np.zeros, optimum_value=0.0, min_d=1),
    "griewank": dict(function=griewank, lower=-400.0, upper=400.0, optimum=np.zeros, optimum_value=0.0, min_d=1),
    "rosenbrock": dict(function=rosenbrock, lower=-5.12, upper=5.12, optimum=np.ones, optimum_value=0.0, min_d=2),
}


def get_objective(name: str, d: int) -> Objective:
    """Look up a registered objective by its lowercase name."""
    try:
        entry = dict(OBJECTIVES[name])
    except KeyError:
        raise ConfigError(f"unknown objective {name!r}; choose from {sorted(OBJECTIVES)}") from None
    min_d = entry.pop("min_d")
    if d < min_d:
        raise ConfigError(f"{name} needs d >= {min_d}, got {d}")
    return Objective(name=name, d=d, **entry)
