"""Wall-clock benchmarks for crossover builders and whole engines.

Repeats of different candidates are interleaved (round-robin) so slow drift
of the host affects every candidate alike. One warm-up round is run and
discarded. The measured region is the crossover work itself: parent and
mutant matrices and random streams are prepared beforehand, and nothing is
serialised inside the timer.
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import engine, variation
from .core import CrossoverKind, DeConfig
from .objectives import Objective
from .rng import RngStream
from .stats import SCHEMA_VERSION

__all__ = [
    "CROSSOVER_KINDS",
    "TimingReport",
    "EngineBenchmark",
    "bench_crossover",
    "bench_crossovers",
    "bench_engine",
]

CROSSOVER_KINDS = ("exp-oracle", "nec-seq", "bin-mask", "nec-par-mask")

_ROW_ORACLES = {
    "exp-oracle": variation.exponential_crossover_oracle,
    "nec-seq": variation.nec_sequential,
}
_MASK_KINDS = {
    "bin-mask": CrossoverKind.BINOMIAL,
    "nec-par-mask": CrossoverKind.NEC_PARALLEL,
}


@dataclass
class TimingReport:
    label: str
    samples: list[float]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.samples) < 1:
            raise ValueError("a timing report needs at least one sample")

    @property
    def repeats(self) -> int:
        return len(self.samples)

    @property
    def median(self) -> float:
        return float(statistics.median(self.samples))

    @property
    def mean(self) -> float:
        return float(statistics.fmean(self.samples))

    @property
    def std(self) -> float:
        return float(statistics.stdev(self.samples)) if len(self.samples) > 1 else 0.0

    def summary(self) -> dict:
        return {
            "repeats": self.repeats,
            "median_s": self.median,
            "mean_s": self.mean,
            "std_s": self.std,
            "min_s": min(self.samples),
            "max_s": max(self.samples),
        }

    def to_record(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "label": self.label,
            "params": dict(self.params),
            "samples": list(self.samples),
            "summary": self.summary(),
        }


def _interleaved(candidates: dict, repeats: int, warmup: int) -> dict[str, list[float]]:
    """Time each ``prepare() -> run()`` candidate ``repeats`` times, round-robin."""
    samples = {name: [] for name in candidates}
    for r in range(warmup + repeats):
        for name, (prepare, run) in candidates.items():
            state = prepare(r)
            start = time.perf_counter()
            run(state)
            elapsed = time.perf_counter() - start
            if r >= warmup:
                samples[name].append(elapsed)
    return samples


def _crossover_candidate(kind: str, cr: float, np_: int, d: int, seed: int, threads: int):
    data = np.random.default_rng(seed)
    parents = data.uniform(-1.0, 1.0, (np_, d))
    mutants = data.uniform(-1.0, 1.0, (np_, d))
    root = RngStream(seed)

    if kind in _ROW_ORACLES:
        oracle = _ROW_ORACLES[kind]

        def prepare(r):
            gen = root.generation(r)
            return [gen.row(i) for i in range(np_)]

        def run(streams):
            for i, stream in enumerate(streams):
                oracle(parents[i], mutants[i], cr, stream)

        return prepare, run

    if kind not in _MASK_KINDS:
        raise ValueError(f"unknown crossover kind {kind!r}; choose from {CROSSOVER_KINDS}")
    mask_kind = _MASK_KINDS[kind]
    blocks = engine.row_blocks(np_, threads)
    pool = ThreadPoolExecutor(max_workers=len(blocks)) if len(blocks) > 1 else None

    def prepare(r):
        return root.generation(r)

    def run(gen):
        engine.map_blocks(pool, lambda rows: variation.mask_rows(mask_kind, cr, d, gen, rows), blocks)

    return prepare, run


def bench_crossovers(
    kinds,
    cr: float,
    np_: int,
    d: int,
    repeats: int = 100,
    *,
    seed: int = 0,
    threads: int = 1,
    warmup: int = 1,
) -> dict[str, TimingReport]:
    """Interleaved timings of several crossover kinds on one grid cell."""
    if repeats < 3:
        raise ValueError("repeats must be >= 3")
    if warmup < 1:
        raise ValueError("at least one warm-up repeat is required")
    candidates = {k: _crossover_candidate(k, cr, np_, d, seed, threads) for k in kinds}
    samples = _interleaved(candidates, repeats, warmup)
    return {
        k: TimingReport(
            label=f"{k}[cr={cr},np={np_},d={d},threads={threads}]",
            samples=samples[k],
            params={"kind": k, "cr": cr, "np": np_, "d": d, "threads": threads, "seed": seed, "warmup": warmup},
        )
        for k in kinds
    }


def bench_crossover(kind: str, cr: float, np_: int, d: int, repeats: int = 100, **kwargs) -> TimingReport:
    return bench_crossovers([kind], cr, np_, d, repeats, **kwargs)[kind]


@dataclass
class EngineBenchmark:
    sequential: TimingReport
    parallel: TimingReport

    @property
    def speedup(self) -> float:
        return self.sequential.median / self.parallel.median

    def to_records(self) -> list[dict]:
        records = [self.sequential.to_record(), self.parallel.to_record()]
        records[1]["summary"]["speedup"] = self.speedup
        return records


def bench_engine(
    config: DeConfig,
    objective: Objective,
    repeats: int,
    *,
    threads: int | None = None,
    warmup: int = 1,
) -> EngineBenchmark:
    """End-to-end wall time of both drivers on one configuration."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    threads = engine.default_threads() if threads is None else threads
    candidates = {
        "sequential": (lambda r: None, lambda _: engine.run_sequential(config, objective)),
        "parallel": (lambda r: None, lambda _: engine.run_parallel(config, objective, threads=threads)),
    }
    samples = _interleaved(candidates, repeats, warmup)
    params = {
        "objective": objective.name,
        "np": config.np,
        "d": config.d,
        "cr": config.cr,
        "f": config.f,
        "max_gen": config.max_gen,
        "crossover": config.crossover_kind.value,
        "seed": config.seed,
    }
    tag = f"{objective.name}[np={config.np},d={config.d},cr={config.cr},gens={config.max_gen}]"
    return EngineBenchmark(
        sequential=TimingReport(f"engine-seq{tag}", samples["sequential"], {**params, "engine": "seq", "threads": 1}),
        parallel=TimingReport(
            f"engine-par{tag}[threads={threads}]", samples["parallel"], {**params, "engine": "par", "threads": threads}
        ),
    )
