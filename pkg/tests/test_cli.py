from __future__ import annotations

import csv
import json
import os
import sys

import pytest

from blie.cli import (
    PARALLELISM_ENV,
    RESULT_FIELDS,
    ExperimentConfig,
    _effective_parallelism,
    bench_suite,
    crn_seed,
    main,
    parse_budget,
    parse_config,
)
from blie.errors import ConfigError

STUB = os.path.join(os.path.dirname(__file__), "stub_evaluator.py")


def _write_config(path, **overrides):
    raw = {
        "algorithm": {"name": "blie", "alpha": "theory", "schedule": "doubling"},
        "instance": {"kind": "toy", "variant": "mu1", "dim": 2, "sigma": 0.1},
        "total_budget": "2^10",
        "seed": 3,
    }
    raw.update(overrides)
    path.write_text(json.dumps(raw))
    return raw


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def test_parse_budget_forms():
    assert parse_budget(4096) == 4096
    assert parse_budget("4096") == 4096
    assert parse_budget("2^12") == 4096
    assert parse_budget("2**12") == 4096
    assert parse_budget(8.0) == 8
    for bad in ("abc", True, 1.5, "2^", None):
        with pytest.raises(ConfigError):
            parse_budget(bad)


def test_parse_config_minimal():
    config = parse_config(
        {
            "algorithm": {"name": "uniform", "level": 2},
            "instance": {"kind": "toy", "variant": "mu1", "dim": 1},
            "total_budget": "2^8",
        }
    )
    assert isinstance(config, ExperimentConfig)
    assert config.total_budget == 256
    assert config.seed == 0
    assert config.algorithm["level"] == 2


def test_parse_config_rejections():
    base = {
        "algorithm": {"name": "blie"},
        "instance": {"kind": "toy", "variant": "mu1", "dim": 1},
        "total_budget": 100,
    }
    bad_cases = [
        {**base, "frobnicate": 1},
        {**base, "algorithm": {"name": "gradient-descent"}},
        {**base, "algorithm": "blie"},
        {k: v for k, v in base.items() if k != "algorithm"},
        {k: v for k, v in base.items() if k != "total_budget"},
        {k: v for k, v in base.items() if k != "instance"},
        {**base, "evaluator": {"command": ["x"], "dim": 1}},
        {**base, "total_budget": 0},
        {**base, "replicates": 0},
        {**base, "parallelism": 0},
        {**base, "t_grid": [256, 256]},
        {**base, "t_grid": [1024, 256]},
    ]
    for raw in bad_cases:
        with pytest.raises(ConfigError):
            parse_config(raw)


def test_parse_config_evaluator_requirements():
    raw = {
        "algorithm": {"name": "uniform", "level": 1},
        "evaluator": {"command": [sys.executable, STUB]},
        "total_budget": 64,
    }
    with pytest.raises(ConfigError):
        parse_config(raw)
    raw["evaluator"]["dim"] = 2
    config = parse_config(raw)
    assert config.instance is None
    assert config.evaluator["dim"] == 2


def test_parse_config_t_grid_accepts_power_strings():
    raw = {
        "algorithm": {"name": "blie"},
        "instance": {"kind": "toy", "variant": "mu1", "dim": 1},
        "total_budget": 100,
        "t_grid": ["2^8", "2^10"],
    }
    assert parse_config(raw).t_grid == (256, 1024)


def test_parallelism_env_override(monkeypatch):
    monkeypatch.delenv(PARALLELISM_ENV, raising=False)
    assert _effective_parallelism(3) == 3
    monkeypatch.setenv(PARALLELISM_ENV, "7")
    assert _effective_parallelism(3) == 7
    monkeypatch.setenv(PARALLELISM_ENV, "zero")
    with pytest.raises(ConfigError):
        _effective_parallelism(3)
    monkeypatch.setenv(PARALLELISM_ENV, "0")
    with pytest.raises(ConfigError):
        _effective_parallelism(3)


def test_crn_seed_pairs_runs():
    assert crn_seed(0, 2**12, 5) == crn_seed(0, 2**12, 5)
    seeds = {crn_seed(0, 2**12, rep) for rep in range(32)}
    assert len(seeds) == 32
    assert crn_seed(0, 2**12, 0) != crn_seed(0, 2**14, 0)


# ---------------------------------------------------------------------------
# run subcommand
# ---------------------------------------------------------------------------


def test_run_writes_trace_and_csv(tmp_path, capsys):
    config_path = tmp_path / "config.json"
    _write_config(config_path)
    out = tmp_path / "out"
    assert main(["run", "--config", str(config_path), "--out", str(out)]) == 0
    captured = capsys.readouterr()
    assert "best_loss=" in captured.out

    csv_path = out / "results.csv"
    with open(csv_path) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0].keys()) == RESULT_FIELDS
    assert len(rows) == 1
    assert rows[0]["algorithm"] == "blie"
    assert rows[0]["T"] == "1024"
    assert int(rows[0]["total_spent"]) <= 1024

    trace_path = out / f"trace-{rows[0]['run_id']}.json"
    trace = json.loads(trace_path.read_text())
    assert trace["total_budget"] == 1024
    assert trace["algorithm"] == "blie"
    assert trace["batches"][0]["level"] >= 1


def test_run_reproducible_across_invocations(tmp_path):
    config_path = tmp_path / "config.json"
    _write_config(config_path)
    traces = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert main(["run", "--config", str(config_path), "--out", str(out)]) == 0
        trace_file = next(out.glob("trace-*.json"))
        trace = json.loads(trace_file.read_text())
        trace.pop("wall_time_ms")
        traces.append(trace)
    assert traces[0] == traces[1]


def test_run_with_external_evaluator(tmp_path):
    config_path = tmp_path / "config.json"
    _write_config(
        config_path,
        algorithm={"name": "uniform", "level": 1},
        instance=None,
        evaluator={"command": [sys.executable, STUB, "norm"], "dim": 2},
        total_budget=40,
    )
    out = tmp_path / "out"
    assert main(["run", "--config", str(config_path), "--out", str(out)]) == 0
    trace = json.loads(next(out.glob("trace-*.json")).read_text())
    assert trace["instance"] is None
    assert trace["simple_regret"] is None
    losses = [c["loss"] for c in trace["candidates"]]
    arms = [c["arm"] for c in trace["candidates"]]
    assert losses == [max(abs(c) for c in arm) for arm in arms]


def test_run_bad_config_exits_2(tmp_path, capsys):
    config_path = tmp_path / "config.json"
    _write_config(config_path, frobnicate=True)
    assert main(["run", "--config", str(config_path)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2
    config_path.write_text("{not json")
    assert main(["run", "--config", str(config_path)]) == 2
    capsys.readouterr()


def test_run_infeasible_budget_exits_1(tmp_path, capsys):
    config_path = tmp_path / "config.json"
    _write_config(config_path, total_budget=3)
    assert main(["run", "--config", str(config_path), "--out", str(tmp_path / "o")]) == 1
    assert "run failed" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# bench subcommand
# ---------------------------------------------------------------------------


def test_bench_toy_tiny(tmp_path, capsys):
    out = tmp_path / "bench"
    code = main(
        [
            "bench",
            "--suite",
            "toy",
            "--t-grid",
            "2^8,2^10",
            "--replicates",
            "2",
            "--algos",
            "blie,random",
            "--sigma",
            "0.05",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    capsys.readouterr()
    with open(out / "results.csv") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    assert header == RESULT_FIELDS
    assert len(rows) == 2 * 2 * 2
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary["algorithms"]) == {"blie", "random"}
    for algo in ("blie", "random"):
        cells = summary["algorithms"][algo]["cells"]
        assert [c["T"] for c in cells] == [256, 1024]
        assert all(c["n"] == 2 for c in cells)


def test_bench_crn_pairs_algorithms_within_replicate(tmp_path, capsys):
    out = tmp_path / "bench"
    assert (
        main(
            [
                "bench",
                "--suite",
                "toy",
                "--t-grid",
                "2^8",
                "--replicates",
                "2",
                "--algos",
                "random,uniform",
                "--out",
                str(out),
            ]
        )
        == 0
    )
    capsys.readouterr()
    with open(out / "results.csv") as fh:
        rows = list(csv.DictReader(fh))
    by_rep: dict[str, set[str]] = {}
    for row in rows:
        rep = row["run_id"].rsplit("rep", 1)[1]
        by_rep.setdefault(rep, set()).add(row["seed"])
    for seeds in by_rep.values():
        assert len(seeds) == 1


def test_bench_adversary_tiny(tmp_path, capsys):
    out = tmp_path / "bench"
    code = main(
        [
            "bench",
            "--suite",
            "adversary",
            "--t-grid",
            "2^12",
            "--replicates",
            "3",
            "--dim",
            "2",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    capsys.readouterr()
    summary = json.loads((out / "summary.json").read_text())
    cell = summary["cells"]["4096"]
    assert cell["regime"] == "fine"
    assert cell["grid_level"] == 4
    assert cell["uniform_above_threshold"] is True
    assert cell["uniform"]["min_regret"] >= cell["threshold"]


def test_bench_schedules_tiny(tmp_path, capsys):
    out = tmp_path / "bench"
    code = main(
        [
            "bench",
            "--suite",
            "schedules",
            "--t-grid",
            "2^10,2^20",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    capsys.readouterr()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["cells"]["1024"]["ace_levels"] == [1, 2, 3, 4, 5]
    assert summary["cells"]["1048576"]["ace_levels"] == list(range(2, 11))
    for key in ("1024", "1048576"):
        cell = summary["cells"][key]
        assert cell["ace_batches"] >= 1
        assert cell["doubling_batches"] >= 1


def test_bench_suite_rejects_unknown_suite():
    with pytest.raises(ConfigError):
        bench_suite("mystery", t_grid=[2**8], replicates=1)


# ---------------------------------------------------------------------------
# zoom subcommand
# ---------------------------------------------------------------------------


def test_zoom_reports_fit(tmp_path, capsys):
    desc = json.dumps({"kind": "toy", "variant": "mu1", "dim": 1, "sigma": 0.0})
    out = tmp_path / "zoom"
    code = main(
        [
            "zoom",
            "--instance",
            desc,
            "--r",
            "0.0625,0.03125,0.015625",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    stats = json.loads(lines[-1])
    assert stats["counts"] == [16, 16, 16]
    assert abs(stats["fitted_dz"]) < 1e-9
    assert abs(stats["fitted_cz"] - 16.0) < 1e-9
    saved = json.loads((out / "zoom.json").read_text())
    assert saved == stats


def test_zoom_error_paths(capsys):
    assert main(["zoom", "--instance", "{not json", "--r", "0.5"]) == 2
    desc = json.dumps({"kind": "toy", "variant": "mu1", "dim": 1, "sigma": 0.0})
    assert main(["zoom", "--instance", desc, "--r", "0.25,0.125"]) == 1
    capsys.readouterr()
