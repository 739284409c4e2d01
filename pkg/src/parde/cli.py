"""Command-line entry point: ``parde run | bench | dist-test``.

Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 statistical
rejection (``dist-test`` only).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import os
import subprocess
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, bench, engine, stats
from .core import ConfigError, CrossoverKind, DeConfig, SelectionKind
from .objectives import OBJECTIVES, get_objective
from .rng import RngStream
from .variation import GeometricLaw

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_REJECTED = 3

ALPHA = 0.01
RECORD_HEADER = ["generation", "best_fitness", "mean_fitness", "best_gen", "evaluations", "elapsed_s"]


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    config: dict
    objective: str
    engine: str
    threads: int
    outputs: dict = field(default_factory=dict)
    version: str = ""
    timestamp: str = ""
    schema_version: int = stats.SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        return cls(**data)


def version_string() -> str:
    """``git describe`` of the source checkout when available, else the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        out = None
    if out is not None and out.returncode == 0 and out.stdout.strip():
        return f"v{__version__}-g{out.stdout.strip()}"
    return f"v{__version__}"


def _csv_list(kind):
    def parse(text: str):
        try:
            values = [kind(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list {text!r}") from None
        if not values:
            raise argparse.ArgumentTypeError("empty list")
        return values

    return parse


def _count(text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid count {text!r}") from None
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"count must be a positive integer, got {text!r}")
    return int(value)


def _thread_value(text: str) -> int:
    if text == "auto":
        return os.cpu_count() or 1
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"threads must be 'auto' or a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("threads must be >= 1")
    return value


def _thread_list(text: str) -> list[tuple[str, int]]:
    return [(t, _thread_value(t)) for t in text.split(",") if t]


def _env_threads() -> list[tuple[str, int]]:
    try:
        return [(os.environ.get(engine.THREADS_ENV) or "auto", engine.default_threads())]
    except (ConfigError, ValueError) as exc:
        raise UsageError(f"bad {engine.THREADS_ENV}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parde", description="Data-parallel differential evolution")
    parser.add_argument("--version", action="version", version=f"parde {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one optimisation and log every generation")
    run.add_argument("--objective", required=True, choices=sorted(OBJECTIVES))
    run.add_argument("--d", type=int, default=10)
    run.add_argument("--np", type=int, default=50)
    run.add_argument("--f", type=float, default=0.5)
    run.add_argument("--cr", type=float, default=0.9)
    run.add_argument("--max-gen", type=int, default=100)
    run.add_argument("--crossover", choices=[k.value for k in CrossoverKind], default="bin")
    run.add_argument("--selection", choices=[k.value for k in SelectionKind], default="random")
    run.add_argument("--engine", choices=["seq", "par"], default="par")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--target", type=float, default=None, help="stop once the best fitness is <= TARGET")
    run.add_argument("--threads", type=_thread_value, default=None)
    run.add_argument("--no-shuffle", action="store_true", help="skip the per-generation row shuffle")
    run.add_argument(
        "--wall-time",
        action="store_true",
        help="fill the elapsed_s column (otherwise left blank so the CSV is reproducible)",
    )
    run.add_argument("--out", required=True, type=Path)

    b = sub.add_parser("bench", help="time crossover builders or whole engines over a grid")
    b.add_argument("--suite", required=True, choices=["crossover", "engine"])
    b.add_argument("--d-list", type=_csv_list(int), default=[10, 100, 1000])
    b.add_argument("--np-list", type=_csv_list(int), default=[100, 1000])
    b.add_argument("--cr-list", type=_csv_list(float), default=[0.2, 0.4, 0.6, 0.8, 1.0])
    b.add_argument("--repeats", type=_count, default=100)
    b.add_argument("--threads", type=_thread_list, default=None, help="comma list of 1, auto or N")
    b.add_argument("--kinds", type=_csv_list(str), default=list(bench.CROSSOVER_KINDS))
    b.add_argument("--objective", choices=sorted(OBJECTIVES), default="ackley")
    b.add_argument("--f", type=float, default=0.5)
    b.add_argument("--max-gen", type=int, default=100)
    b.add_argument("--crossover", choices=[k.value for k in CrossoverKind], default="nec-par")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True, type=Path)

    dist = sub.add_parser("dist-test", help="check segment lengths against the geometric law")
    dist.add_argument("--cr", type=float, required=True)
    dist.add_argument("--d", type=int, required=True)
    dist.add_argument("--samples", type=_count, default=1_000_000)
    dist.add_argument("--seed", type=int, default=0)
    dist.add_argument("--out", required=True, type=Path)
    return parser


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_run(args) -> int:
    objective = get_objective(args.objective, args.d)
    config = DeConfig(
        f=args.f,
        cr=args.cr,
        np=args.np,
        d=args.d,
        max_gen=args.max_gen,
        bounds=objective.bounds,
        crossover_kind=args.crossover,
        selection_kind=args.selection,
        seed=args.seed,
        target_fitness=args.target,
        shuffle=not args.no_shuffle,
    )
    threads = args.threads if args.threads is not None else engine.default_threads()
    args.out.mkdir(parents=True, exist_ok=True)
    paths = {
        "manifest": args.out / "manifest.json",
        "records": args.out / "records.csv",
        "summary": args.out / "summary.json",
    }
    manifest = RunManifest(
        config=config.to_dict(),
        objective=objective.name,
        engine=args.engine,
        threads=1 if args.engine == "seq" else threads,
        outputs={k: str(v) for k, v in paths.items()},
        version=version_string(),
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    )
    _write_json(paths["manifest"], manifest.to_dict())

    if args.engine == "seq":
        result = engine.run_sequential(config, objective)
    else:
        result = engine.run_parallel(config, objective, threads=threads)

    with paths["records"].open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_HEADER)
        for rec in result.records:
            writer.writerow([
                rec.generation,
                repr(rec.best_fitness),
                repr(rec.mean_fitness),
                rec.best_generation_so_far,
                rec.evaluations,
                f"{rec.elapsed:.6f}" if args.wall_time else "",
            ])
    last = result.records[-1]
    _write_json(paths["summary"], {
        "schema_version": stats.SCHEMA_VERSION,
        "objective": objective.name,
        "engine": args.engine,
        "generations": last.generation,
        "evaluations": last.evaluations,
        "best_fitness": result.best_fitness,
        "best_gen": last.best_generation_so_far,
        "best_genome": result.best_genome.tolist(),
        "elapsed_s": last.elapsed,
    })
    print(f"{objective.name}: best {result.best_fitness:.6g} at generation {last.best_generation_so_far} "
          f"after {last.generation} generations -> {args.out}")
    return EXIT_OK


def _bench_rows(records: list[dict]) -> list[dict]:
    rows = []
    for rec in records:
        p, s = rec["params"], rec["summary"]
        rows.append({
            "label": rec["label"],
            "kind": p.get("kind", p.get("engine")),
            "threads": p["threads"],
            "cr": p["cr"],
            "np": p["np"],
            "d": p["d"],
            "repeats": s["repeats"],
            "median_s": s["median_s"],
            "mean_s": s["mean_s"],
            "std_s": s["std_s"],
            "speedup": s.get("speedup", ""),
        })
    return rows


def cmd_bench(args) -> int:
    thread_sets = args.threads if args.threads is not None else _env_threads()
    unknown = set(args.kinds) - set(bench.CROSSOVER_KINDS)
    if unknown:
        raise UsageError(f"unknown crossover kinds {sorted(unknown)}; choose from {bench.CROSSOVER_KINDS}")
    records = []
    for label, threads in thread_sets:
        for d in args.d_list:
            for np_ in args.np_list:
                for cr in args.cr_list:
                    if args.suite == "crossover":
                        reports = bench.bench_crossovers(
                            args.kinds, cr, np_, d, args.repeats, seed=args.seed, threads=threads
                        )
                        cell = [r.to_record() for r in reports.values()]
                    else:
                        objective = get_objective(args.objective, d)
                        config = DeConfig(
                            f=args.f, cr=cr, np=np_, d=d, max_gen=args.max_gen, bounds=objective.bounds,
                            crossover_kind=args.crossover, seed=args.seed,
                        )
                        cell = bench.bench_engine(config, objective, args.repeats, threads=threads).to_records()
                    for rec in cell:
                        rec["params"]["threads_label"] = label
                    records.extend(cell)
                    print(f"bench {args.suite} threads={label} d={d} np={np_} cr={cr}: {len(cell)} reports",
                          file=sys.stderr)
    args.out.mkdir(parents=True, exist_ok=True)
    _write_json(args.out / f"bench_{args.suite}.json", {
        "schema_version": stats.SCHEMA_VERSION,
        "suite": args.suite,
        "version": version_string(),
        "reports": records,
    })
    rows = _bench_rows(records)
    with (args.out / f"bench_{args.suite}.csv").open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    print(f"{len(records)} timing reports -> {args.out}")
    return EXIT_OK


def cmd_dist_test(args) -> int:
    if not 0.0 <= args.cr <= 1.0 or args.d < 1:
        raise UsageError("need 0 <= cr <= 1 and d >= 1")
    if args.samples < 10_000:
        raise UsageError("--samples must be >= 10000")
    law = GeometricLaw(args.cr, args.d)
    hist_exp, hist_nec, p_two = stats.compare_crossover_lengths(args.cr, args.d, args.samples, RngStream(args.seed))
    stat_nec, p_nec = stats.chi_square_gof(hist_nec, law)
    stat_exp, p_exp = stats.chi_square_gof(hist_exp, law)
    passed = min(p_nec, p_exp, p_two) > ALPHA
    params = {"cr": args.cr, "d": args.d, "samples": args.samples, "seed": args.seed}
    args.out.mkdir(parents=True, exist_ok=True)
    _write_json(args.out / "dist_test.json", {
        "schema_version": stats.SCHEMA_VERSION,
        "params": params,
        "alpha": ALPHA,
        "expected_pmf": law.pmf().tolist(),
        "histograms": [hist_exp.to_record("exp", params), hist_nec.to_record("nec", params)],
        "tests": {
            "nec_vs_law": {"statistic": stat_nec, "p_value": p_nec},
            "exp_vs_law": {"statistic": stat_exp, "p_value": p_exp},
            "nec_vs_exp": {"p_value": p_two},
        },
        "passed": passed,
    })
    print(f"dist-test cr={args.cr} d={args.d}: p(nec|law)={p_nec:.4g} p(exp|law)={p_exp:.4g} "
          f"p(nec~exp)={p_two:.4g} -> {'pass' if passed else 'REJECT'}")
    return EXIT_OK if passed else EXIT_REJECTED


_COMMANDS = {"run": cmd_run, "bench": cmd_bench, "dist-test": cmd_dist_test}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"parde {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - exit-code contract
        print(f"parde {args.command}: failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
