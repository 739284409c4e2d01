"""Run configuration, population containers and initialization."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from . import rng as _rng
from .rng import RngStream

if TYPE_CHECKING:
    from .objectives import Objective

__all__ = [
    "ConfigError",
    "CrossoverKind",
    "SelectionKind",
    "DeConfig",
    "Population",
    "CrossoverMask",
    "TrialBatch",
    "init_population",
]


class ConfigError(ValueError):
    """Invalid run parameters."""


class CrossoverKind(enum.Enum):
    BINOMIAL = "bin"
    EXPONENTIAL = "exp"
    NEC_SEQUENTIAL = "nec"
    NEC_PARALLEL = "nec-par"


class SelectionKind(enum.Enum):
    RANDOM = "random"
    RANDOM_OFFSET = "offset"
    PERMUTATION = "perm"


@dataclass(frozen=True)
class DeConfig:
    """All parameters of one DE run.

    ``bounds`` is a ``(lower, upper)`` pair; each side may be a scalar or a
    length-``d`` sequence and is stored as a float array of length ``d``.
    Bounds only shape the initial population.
    """

    f: float
    cr: float
    np: int
    d: int
    max_gen: int
    bounds: tuple = (-1.0, 1.0)
    crossover_kind: CrossoverKind = CrossoverKind.BINOMIAL
    selection_kind: SelectionKind = SelectionKind.RANDOM
    seed: int = 0
    target_fitness: float | None = None
    shuffle: bool = True

    def __post_init__(self):
        if not 0.0 <= self.cr <= 1.0:
            raise ConfigError(f"cr must lie in [0, 1], got {self.cr}")
        if int(self.np) != self.np or self.np < 4:
            raise ConfigError(f"np must be an integer >= 4, got {self.np}")
        if int(self.d) != self.d or self.d < 1:
            raise ConfigError(f"d must be a positive integer, got {self.d}")
        if int(self.max_gen) != self.max_gen or self.max_gen < 0:
            raise ConfigError(f"max_gen must be a nonnegative integer, got {self.max_gen}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        try:
            lower, upper = self.bounds
        except (TypeError, ValueError):
            raise ConfigError("bounds must be a (lower, upper) pair") from None
        try:
            lower = np.broadcast_to(np.asarray(lower, dtype=float), (self.d,)).copy()
            upper = np.broadcast_to(np.asarray(upper, dtype=float), (self.d,)).copy()
        except ValueError:
            raise ConfigError(f"bounds must broadcast to length d={self.d}") from None
        if not np.all(lower < upper):
            raise ConfigError("every lower bound must be strictly below its upper bound")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "bounds", (lower, upper))
        try:
            object.__setattr__(self, "crossover_kind", CrossoverKind(self.crossover_kind))
            object.__setattr__(self, "selection_kind", SelectionKind(self.selection_kind))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def lower(self) -> np.ndarray:
        return self.bounds[0]

    @property
    def upper(self) -> np.ndarray:
        return self.bounds[1]

    def to_dict(self) -> dict:
        return {
            "f": self.f,
            "cr": self.cr,
            "np": self.np,
            "d": self.d,
            "max_gen": self.max_gen,
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "crossover_kind": self.crossover_kind.value,
            "selection_kind": self.selection_kind.value,
            "seed": self.seed,
            "target_fitness": self.target_fitness,
            "shuffle": self.shuffle,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DeConfig":
        data = dict(data)
        bounds = (data.pop("lower"), data.pop("upper"))
        return cls(bounds=bounds, **data)


@dataclass
class Population:
    genomes: np.ndarray
    fitness: np.ndarray
    generation: int = 0

    @property
    def size(self) -> int:
        return self.genomes.shape[0]

    def copy(self) -> "Population":
        return Population(self.genomes.copy(), self.fitness.copy(), self.generation)


@dataclass
class CrossoverMask:
    """Boolean ``np x d`` matrix; True marks genes taken from the mutant."""

    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.ndim != 2:
            raise ValueError("mask must be two-dimensional")

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def row_counts(self) -> np.ndarray:
        return self.bits.sum(axis=1)


@dataclass
class TrialBatch:
    genomes: np.ndarray
    fitness: np.ndarray | None = field(default=None)


def init_population(config: DeConfig, rng: RngStream, objective: "Objective") -> Population:
    """Uniform initial population inside the configured box, evaluated once.

    Row ``i`` is drawn from ``rng.purpose(INIT).row(i)``.
    """
    if objective.d != config.d:
        raise ConfigError(f"objective dimension {objective.d} != config d {config.d}")
    keys = _rng.row_keys(rng.purpose(_rng.INIT), np.arange(config.np))
    u = _rng.uniform_at(keys[:, None], np.arange(config.d)[None, :])
    lower, upper = config.bounds
    genomes = lower + (upper - lower) * u
    return Population(genomes, objective.evaluate_batch(genomes), 0)
