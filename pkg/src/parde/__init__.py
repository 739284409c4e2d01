"""Data-parallel differential evolution with a sampled-length exponential crossover."""

__version__ = "0.1.0"

from .core import ConfigError, CrossoverKind, DeConfig, Population, SelectionKind  # noqa: E402
from .engine import run_parallel, run_sequential  # noqa: E402
from .objectives import get_objective  # noqa: E402
from .rng import RngStream, split_stream  # noqa: E402

__all__ = [
    "ConfigError",
    "CrossoverKind",
    "DeConfig",
    "Population",
    "SelectionKind",
    "RngStream",
    "split_stream",
    "get_objective",
    "run_parallel",
    "run_sequential",
]
