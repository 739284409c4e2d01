import csv
import json

import pytest

from parde import cli, variation
from parde.cli import EXIT_OK, EXIT_REJECTED, EXIT_RUNTIME, EXIT_USAGE, RECORD_HEADER, RunManifest, main

RUN = ["run", "--objective", "ackley", "--d", "6", "--np", "12", "--max-gen", "20"]


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_run_writes_outputs(tmp_path):
    assert main(RUN + ["--out", str(tmp_path)]) == EXIT_OK
    rows = _rows(tmp_path / "records.csv")
    assert rows[0] == RECORD_HEADER
    assert len(rows) == 22
    assert all(r[-1] == "" for r in rows[1:])
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["generations"] == 20 and summary["evaluations"] == 12 * 21
    assert summary["best_fitness"] == float(rows[-1][1])


def test_run_engines_give_byte_identical_logs(tmp_path):
    for engine in ("seq", "par"):
        assert main(RUN + ["--crossover", "exp", "--engine", engine, "--out", str(tmp_path / engine)]) == EXIT_OK
    assert (tmp_path / "seq" / "records.csv").read_bytes() == (tmp_path / "par" / "records.csv").read_bytes()


def test_run_repeat_is_byte_identical(tmp_path):
    for name in ("a", "b"):
        main(RUN + ["--threads", "2", "--out", str(tmp_path / name)])
    assert (tmp_path / "a" / "records.csv").read_bytes() == (tmp_path / "b" / "records.csv").read_bytes()


def test_run_wall_time_column(tmp_path):
    assert main(RUN + ["--wall-time", "--out", str(tmp_path)]) == EXIT_OK
    assert all(float(r[-1]) >= 0 for r in _rows(tmp_path / "records.csv")[1:])


def test_run_zero_generations_single_record(tmp_path):
    assert main(RUN[:-2] + ["--max-gen", "0", "--out", str(tmp_path)]) == EXIT_OK
    assert len(_rows(tmp_path / "records.csv")) == 2


def test_manifest_round_trip(tmp_path):
    main(RUN + ["--out", str(tmp_path)])
    data = json.loads((tmp_path / "manifest.json").read_text())
    manifest = RunManifest.from_dict(data)
    assert manifest.to_dict() == data
    assert data["schema_version"] == 1 and data["config"]["np"] == 12
    assert data["version"].startswith("v")


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--objective", "ackley"],
        ["run", "--objective", "sphere", "--out", "x"],
        RUN + ["--out", "x", "--bogus"],
        ["run", "--objective", "rosenbrock", "--d", "1", "--out", "{tmp}"],
        ["run", "--objective", "ackley", "--np", "3", "--out", "{tmp}"],
        ["dist-test", "--cr", "1.5", "--d", "10", "--out", "{tmp}"],
        ["bench", "--suite", "crossover", "--threads", "zero", "--out", "{tmp}"],
        [],
    ],
)
def test_usage_errors_exit_two(argv, tmp_path, capsys):
    argv = [a.replace("{tmp}", str(tmp_path)) for a in argv]
    assert main(argv) == EXIT_USAGE
    assert capsys.readouterr().err


def test_runtime_failure_exit_one(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(RUN + ["--out", str(blocker)]) == EXIT_RUNTIME
    assert "failed" in capsys.readouterr().err


def test_dist_test_passes_and_writes_json(tmp_path):
    code = main(["dist-test", "--cr", "0.5", "--d", "10", "--samples", "1e6", "--out", str(tmp_path)])
    data = json.loads((tmp_path / "dist_test.json").read_text())
    assert code == EXIT_OK and data["passed"]
    assert {h["label"] for h in data["histograms"]} == {"exp", "nec"}
    assert set(data["tests"]) == {"nec_vs_law", "exp_vs_law", "nec_vs_exp"}


def test_dist_test_rejects_corrupted_sampler(tmp_path, monkeypatch):
    original = variation.sample_lengths_batch

    def off_by_one(cr, d, np_, rng):
        return (original(cr, d, np_, rng) % d) + 1

    monkeypatch.setattr(variation, "sample_lengths_batch", off_by_one)
    code = main(["dist-test", "--cr", "0.5", "--d", "10", "--samples", "20000", "--out", str(tmp_path)])
    assert code == EXIT_REJECTED
    assert not json.loads((tmp_path / "dist_test.json").read_text())["passed"]


def test_bench_crossover_grid_count(tmp_path):
    argv = ["bench", "--suite", "crossover", "--d-list", "4,6", "--np-list", "8", "--cr-list", "0.2,0.9",
            "--repeats", "3", "--threads", "1,2", "--out", str(tmp_path)]
    assert main(argv) == EXIT_OK
    data = json.loads((tmp_path / "bench_crossover.json").read_text())
    assert len(data["reports"]) == 2 * 1 * 2 * 4 * 2
    assert all(len(r["samples"]) == 3 for r in data["reports"])
    rows = _rows(tmp_path / "bench_crossover.csv")
    assert len(rows) == 1 + 32 and "median_s" in rows[0]


def test_bench_threads_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("PARDE_THREADS", "2")
    argv = ["bench", "--suite", "crossover", "--d-list", "4", "--np-list", "8", "--cr-list", "0.5",
            "--repeats", "3", "--kinds", "nec-par-mask", "--out", str(tmp_path)]
    assert main(argv) == EXIT_OK
    (report,) = json.loads((tmp_path / "bench_crossover.json").read_text())["reports"]
    assert report["params"]["threads"] == 2


def test_bench_engine_suite(tmp_path):
    argv = ["bench", "--suite", "engine", "--d-list", "4", "--np-list", "8", "--cr-list", "0.5",
            "--repeats", "3", "--max-gen", "2", "--threads", "1", "--out", str(tmp_path)]
    assert main(argv) == EXIT_OK
    reports = json.loads((tmp_path / "bench_engine.json").read_text())["reports"]
    assert [r["params"]["engine"] for r in reports] == ["seq", "par"]
    assert "speedup" in reports[1]["summary"]


def test_bench_unknown_kind(tmp_path):
    argv = ["bench", "--suite", "crossover", "--kinds", "nope", "--out", str(tmp_path)]
    assert main(argv) == EXIT_USAGE


def test_version_string_format():
    assert cli.version_string().startswith("v0.1.0")
