import numpy as np
import pytest

from parde.core import (
    ConfigError,
    CrossoverKind,
    CrossoverMask,
    DeConfig,
    SelectionKind,
    init_population,
)
from parde.objectives import get_objective
from parde.rng import RngStream


def _cfg(**kw):
    base = dict(f=0.5, cr=0.9, np=10, d=3, max_gen=5)
    base.update(kw)
    return DeConfig(**base)


def test_defaults_and_enum_coercion():
    cfg = _cfg(crossover_kind="nec-par", selection_kind="perm")
    assert cfg.crossover_kind is CrossoverKind.NEC_PARALLEL
    assert cfg.selection_kind is SelectionKind.PERMUTATION
    assert cfg.lower.shape == (3,) and cfg.upper.shape == (3,)


@pytest.mark.parametrize(
    "kw",
    [
        {"cr": -0.1},
        {"cr": 1.5},
        {"np": 3},
        {"d": 0},
        {"max_gen": -1},
        {"seed": -1},
        {"bounds": (1.0, 1.0)},
        {"crossover_kind": "bogus"},
    ],
)
def test_invalid_configs_raise(kw):
    with pytest.raises(ConfigError):
        _cfg(**kw)


def test_bounds_arrays_are_read_only():
    cfg = _cfg(bounds=([0, 0, 0], [1, 2, 3]))
    with pytest.raises(ValueError):
        cfg.upper[0] = 9.0


def test_dict_round_trip():
    cfg = _cfg(bounds=([0, -1, -2], [1, 2, 3]), seed=77, target_fitness=1e-6, shuffle=False)
    back = DeConfig.from_dict(cfg.to_dict())
    assert back.to_dict() == cfg.to_dict()


def test_init_population_within_bounds_and_deterministic():
    cfg = DeConfig(f=0.5, cr=0.5, np=4, d=2, max_gen=1, bounds=(0.0, 1.0), seed=7)

    class Sphere:
        d = 2

        def evaluate_batch(self, x):
            return np.sum(x**2, axis=1)

    a = init_population(cfg, RngStream(7), Sphere())
    b = init_population(cfg, RngStream(7), Sphere())
    assert a.genomes.shape == (4, 2)
    assert np.all((a.genomes >= 0) & (a.genomes <= 1))
    assert np.array_equal(a.genomes, b.genomes)
    assert np.array_equal(a.fitness, np.sum(a.genomes**2, axis=1))
    assert a.generation == 0


def test_init_population_dimension_mismatch():
    cfg = _cfg(d=3)
    with pytest.raises(ConfigError):
        init_population(cfg, RngStream(0), get_objective("ackley", 4))


def test_mask_row_counts():
    mask = CrossoverMask([[True, False, True], [False, False, True]])
    assert mask.shape == (2, 3)
    assert mask.row_counts().tolist() == [2, 1]
