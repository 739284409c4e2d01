"""Sequential and mask-first DE drivers.

Both drivers consume the same per-(generation, row) substreams, so for equal
configurations they walk the same population trajectory bit for bit:

* :func:`run_sequential` visits one individual at a time -- pick donors,
  build the full mutant, recombine, evaluate, replace.
* :func:`run_parallel` does each phase for the whole population at once --
  shuffle, base selection, crossover mask, mutation at masked genes only,
  batch evaluation, vectorised replacement. Row blocks of each phase may be
  spread over a thread pool; phases are separated by barriers.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import selection, variation
from .core import ConfigError, DeConfig, Population, SelectionKind, TrialBatch, init_population
from .objectives import Objective
from .rng import SHUFFLE, RngStream

__all__ = [
    "RunRecord",
    "RunResult",
    "run_sequential",
    "run_parallel",
    "replace_greedy",
    "should_stop",
    "default_threads",
    "THREADS_ENV",
]


THREADS_ENV = "PARDE_THREADS"
_MIN_ROWS_PER_TASK = 16


def default_threads() -> int:
    """Worker count from ``$PARDE_THREADS``, else the CPU count."""
    value = os.environ.get(THREADS_ENV)
    if value:
        if value == "auto":
            return os.cpu_count() or 1
        threads = int(value)
        if threads < 1:
            raise ConfigError(f"{THREADS_ENV} must be >= 1, got {value!r}")
        return threads
    return os.cpu_count() or 1


@dataclass
class RunRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_generation_so_far: int
    evaluations: int
    elapsed: float


@dataclass
class RunResult:
    population: Population
    best_genome: np.ndarray
    best_fitness: float
    records: list[RunRecord] = field(default_factory=list)
    config: DeConfig | None = None

    @property
    def generations(self) -> int:
        return self.population.generation


def replace_greedy(parents: Population, trials: TrialBatch) -> Population:
    """Keep each trial row only if its fitness is strictly lower than the parent's."""
    if trials.fitness is None:
        raise ValueError("trial batch has not been evaluated")
    if trials.genomes.shape != parents.genomes.shape:
        raise ValueError("trial and parent shapes differ")
    better = trials.fitness < parents.fitness
    genomes = parents.genomes.copy()
    fitness = parents.fitness.copy()
    genomes[better] = trials.genomes[better]
    fitness[better] = trials.fitness[better]
    return Population(genomes, fitness, parents.generation + 1)


def should_stop(record: RunRecord, config: DeConfig) -> bool:
    if record.generation >= config.max_gen:
        return True
    return config.target_fitness is not None and record.best_fitness <= config.target_fitness


def _check(config: DeConfig, objective: Objective):
    if objective.d != config.d:
        raise ConfigError(f"objective {objective.name} has d={objective.d}, config has d={config.d}")


class _Tracker:
    def __init__(self, np_: int):
        self.np = np_
        self.start = time.perf_counter()
        self.best = np.inf
        self.best_gen = 0
        self.best_genome = None
        self.records: list[RunRecord] = []

    def log(self, pop: Population) -> RunRecord:
        i = int(np.argmin(pop.fitness))
        if pop.fitness[i] < self.best:
            self.best = float(pop.fitness[i])
            self.best_gen = pop.generation
            self.best_genome = pop.genomes[i].copy()
        record = RunRecord(
            generation=pop.generation,
            best_fitness=self.best,
            mean_fitness=float(np.mean(pop.fitness)),
            best_generation_so_far=self.best_gen,
            evaluations=self.np * (pop.generation + 1),
            elapsed=time.perf_counter() - self.start,
        )
        self.records.append(record)
        return record

    def result(self, pop: Population, config: DeConfig) -> RunResult:
        genome = self.best_genome if self.best_genome is not None else pop.genomes[int(np.argmin(pop.fitness))].copy()
        return RunResult(pop, genome, self.best, self.records, config)


def _shuffled(pop: Population, gen: RngStream) -> Population:
    order = selection.fisher_yates(pop.size, gen.purpose(SHUFFLE))
    return Population(pop.genomes[order], pop.fitness[order], pop.generation)


def run_sequential(
    config: DeConfig,
    objective: Objective,
    on_generation: Callable[[Population], None] | None = None,
) -> RunResult:
    """Reference driver: one individual at a time, mutation before crossover."""
    _check(config, objective)
    root = RngStream(config.seed)
    pop = init_population(config, root, objective)
    tracker = _Tracker(config.np)
    record = tracker.log(pop)
    if on_generation is not None:
        on_generation(pop)
    n = config.np
    while not should_stop(record, config):
        gen = root.generation(pop.generation)
        if config.shuffle:
            pop = _shuffled(pop, gen)
        x, fit = pop.genomes, pop.fitness
        if config.selection_kind is not SelectionKind.RANDOM:
            base = selection.select(config.selection_kind, n, gen)
        next_x = x.copy()
        next_fit = fit.copy()
        for i in range(n):
            row = gen.row(i)
            if config.selection_kind is SelectionKind.RANDOM:
                b = selection.random_base_index(i, n, gen)
            else:
                b = int(base[i])
            r0, r1, r2 = variation.donors_for_row(i, b, n, row)
            mutant = x[r0] + config.f * (x[r1] - x[r2])
            trial = variation.crossover_row(config.crossover_kind, x[i], mutant, config.cr, row)
            value = objective.evaluate_row(trial)
            if value < fit[i]:
                next_x[i] = trial
                next_fit[i] = value
        pop = Population(next_x, next_fit, pop.generation + 1)
        record = tracker.log(pop)
        if on_generation is not None:
            on_generation(pop)
    return tracker.result(pop, config)


def row_blocks(n: int, threads: int) -> list[np.ndarray]:
    if threads <= 1:
        return [np.arange(n)]
    count = max(1, min(threads, n // _MIN_ROWS_PER_TASK))
    return [b for b in np.array_split(np.arange(n), count) if b.size]


def map_blocks(pool, fn, items):
    if pool is None:
        return [fn(item) for item in items]
    return list(pool.map(fn, items))


def run_parallel(
    config: DeConfig,
    objective: Objective,
    threads: int | None = None,
    on_generation: Callable[[Population], None] | None = None,
) -> RunResult:
    """Mask-first driver: every phase processes the whole population.

    ``threads`` caps the worker pool (default: :func:`default_threads`). The
    result does not depend on it.
    """
    _check(config, objective)
    threads = default_threads() if threads is None else int(threads)
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    root = RngStream(config.seed)
    pop = init_population(config, root, objective)
    tracker = _Tracker(config.np)
    record = tracker.log(pop)
    if on_generation is not None:
        on_generation(pop)
    n, d = config.np, config.d
    blocks = row_blocks(n, threads)
    pool = ThreadPoolExecutor(max_workers=len(blocks)) if len(blocks) > 1 else None
    try:
        while not should_stop(record, config):
            gen = root.generation(pop.generation)
            if config.shuffle:
                pop = _shuffled(pop, gen)
            r0 = selection.select(config.selection_kind, n, gen)
            x = pop.genomes
            masks = map_blocks(pool, lambda rows: variation.mask_rows(config.crossover_kind, config.cr, d, gen, rows), blocks)
            trials = np.vstack(
                map_blocks(pool, lambda item: variation.mutate_rows(x, r0, item[1], config.f, gen, item[0]), zip(blocks, masks))
            )
            fitness = np.concatenate(map_blocks(pool, lambda rows: objective.evaluate_batch(trials[rows]), blocks))
            pop = replace_greedy(pop, TrialBatch(trials, fitness))
            record = tracker.log(pop)
            if on_generation is not None:
                on_generation(pop)
    finally:
        if pool is not None:
            pool.shutdown()
    return tracker.result(pop, config)
