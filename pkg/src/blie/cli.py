"""Command-line experiment harness.

Three subcommands:

``run --config cfg.json [--out DIR]``
    One optimization run from a JSON config. Writes ``trace-<run_id>.json``
    and a one-row ``results.csv``. Exit 0 on success, 2 on invalid config,
    1 on a run error.

``bench --suite {toy,adversary,schedules} [options] --out DIR``
    Factorial benchmark (algorithm x T x replicate) with common random
    numbers: every algorithm at a given (T, replicate) sees the same
    instance noise seed. Writes ``results.csv`` and ``summary.json``
    (per-cell mean/std regret plus a log2-log2 slope fit per algorithm).
    Failed cells are recorded and the suite continues; exit 1 if any failed.

``zoom --instance JSON --r LIST [--out DIR]``
    Near-optimal cube counts and the fitted scaling exponent for an
    analytic instance; prints a table and JSON.

Config schema for ``run`` (exactly one of "instance" or "evaluator")::

    {
      "algorithm": {"name": "blie", "alpha": "theory", "beta": 2.0,
                     "schedule": "doubling"},
      "instance": {"kind": "toy", "variant": "mu1", "dim": 2, "sigma": 0.1},
      "evaluator": {"command": ["python", "eval.py"], "dim": 2,
                     "timeout_s": 3600},
      "total_budget": 4096,
      "seed": 0,
      "replicates": 1,
      "parallelism": 1,
      "output_dir": "out"
    }

Budgets accept plain integers or the strings "2^k" / "2**k". The
``BLIE_PARALLELISM`` environment variable overrides any configured
parallelism.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import BaselineConfig, run_baseline
from .core import BlieConfig, RunTrace, run_blie
from .errors import BlieError, ConfigError
from .executor import ExternalEvaluator, InProcessBackend
from .geometry import (
    EdgeLengthSchedule,
    ace_schedule,
    doubling_schedule,
    explicit_schedule,
)
from .instances import (
    Instance,
    certified_instance,
    fit_zooming_dimension,
    instance_from_descriptor,
    toy_instance,
    uniform_search_adversary,
)

__all__ = [
    "ExperimentConfig",
    "RESULT_FIELDS",
    "bench_suite",
    "main",
    "parse_budget",
    "parse_config",
    "run_single",
    "trace_to_row",
    "write_results_csv",
]

RESULT_FIELDS = [
    "run_id",
    "algorithm",
    "instance",
    "T",
    "seed",
    "batches",
    "total_spent",
    "best_loss",
    "simple_regret",
    "wall_time_ms",
]

PARALLELISM_ENV = "BLIE_PARALLELISM"
ALGORITHM_NAMES = ("blie", "uniform", "random", "sh", "hyperband")
SUITES = ("toy", "adversary", "schedules")


def parse_budget(value) -> int:
    """Parse a budget that may be written 4096, "4096", "2^12" or "2**12"."""
    if isinstance(value, bool):
        raise ConfigError(f"budget must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        text = value.strip().replace("**", "^")
        try:
            if "^" in text:
                base, _, exp = text.partition("^")
                return int(base) ** int(exp)
            return int(text)
        except ValueError:
            pass
    raise ConfigError(f"cannot parse budget {value!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated contents of a run config file."""

    algorithm: dict
    total_budget: int
    seed: int = 0
    replicates: int = 1
    parallelism: int = 1
    instance: dict | None = None
    evaluator: dict | None = None
    t_grid: tuple[int, ...] | None = None
    output_dir: str = "."

    def to_dict(self) -> dict:
        out = {
            "algorithm": dict(self.algorithm),
            "total_budget": self.total_budget,
            "seed": self.seed,
            "replicates": self.replicates,
            "parallelism": self.parallelism,
            "output_dir": self.output_dir,
        }
        if self.instance is not None:
            out["instance"] = dict(self.instance)
        if self.evaluator is not None:
            out["evaluator"] = dict(self.evaluator)
        if self.t_grid is not None:
            out["t_grid"] = list(self.t_grid)
        return out


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a config dictionary; raises :class:`ConfigError` on any issue."""
    if not isinstance(raw, dict):
        raise ConfigError(f"config must be a JSON object, got {type(raw).__name__}")
    known = {
        "algorithm",
        "instance",
        "evaluator",
        "total_budget",
        "seed",
        "replicates",
        "parallelism",
        "t_grid",
        "output_dir",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")

    algorithm = raw.get("algorithm")
    if not isinstance(algorithm, dict) or "name" not in algorithm:
        raise ConfigError("config needs an 'algorithm' object with a 'name'")
    if algorithm["name"] not in ALGORITHM_NAMES:
        raise ConfigError(
            f"unknown algorithm {algorithm['name']!r}; expected one of "
            f"{ALGORITHM_NAMES}"
        )

    has_instance = "instance" in raw and raw["instance"] is not None
    has_evaluator = "evaluator" in raw and raw["evaluator"] is not None
    if has_instance == has_evaluator:
        raise ConfigError("config needs exactly one of 'instance' or 'evaluator'")
    if has_instance and not isinstance(raw["instance"], dict):
        raise ConfigError("'instance' must be an object")
    if has_evaluator:
        ev = raw["evaluator"]
        if not isinstance(ev, dict) or not ev.get("command"):
            raise ConfigError("'evaluator' must be an object with a 'command' list")
        if "dim" not in ev:
            raise ConfigError("'evaluator' needs a 'dim' field")

    if "total_budget" not in raw:
        raise ConfigError("config needs a 'total_budget'")
    total_budget = parse_budget(raw["total_budget"])
    if total_budget < 1:
        raise ConfigError(f"total_budget must be positive, got {total_budget}")

    replicates = int(raw.get("replicates", 1))
    if replicates < 1:
        raise ConfigError(f"replicates must be >= 1, got {replicates}")

    parallelism = int(raw.get("parallelism", 1))
    if parallelism < 1:
        raise ConfigError(f"parallelism must be >= 1, got {parallelism}")

    t_grid = None
    if raw.get("t_grid") is not None:
        grid = [parse_budget(v) for v in raw["t_grid"]]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"t_grid must be strictly increasing, got {grid}")
        t_grid = tuple(grid)

    return ExperimentConfig(
        algorithm=dict(algorithm),
        total_budget=total_budget,
        seed=int(raw.get("seed", 0)),
        replicates=replicates,
        parallelism=parallelism,
        instance=dict(raw["instance"]) if has_instance else None,
        evaluator=dict(raw["evaluator"]) if has_evaluator else None,
        t_grid=t_grid,
        output_dir=str(raw.get("output_dir", ".")),
    )


def _effective_parallelism(configured: int) -> int:
    override = os.environ.get(PARALLELISM_ENV)
    if override:
        try:
            value = int(override)
        except ValueError:
            raise ConfigError(
                f"{PARALLELISM_ENV} must be an integer, got {override!r}"
            ) from None
        if value < 1:
            raise ConfigError(f"{PARALLELISM_ENV} must be >= 1, got {value}")
        return value
    return configured


def _build_schedule(
    spec, dim: int, beta: float, total_budget: int, dz_default: float
) -> EdgeLengthSchedule:
    if spec is None or spec == "doubling":
        return doubling_schedule()
    if spec == "ace":
        return ace_schedule(dim, dz_default, beta, total_budget)
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "doubling":
            return doubling_schedule()
        if kind == "ace":
            dz = float(spec.get("dz", dz_default))
            return ace_schedule(dim, dz, beta, total_budget)
        if kind == "explicit":
            return explicit_schedule([float(r) for r in spec["edge_lengths"]])
    raise ConfigError(f"cannot interpret schedule spec {spec!r}")


def _resolve_alpha(spec, instance: Instance | None) -> float:
    if spec is None or spec == "theory":
        if instance is None:
            raise ConfigError(
                "alpha 'theory' needs an instance with a known Lipschitz bound"
            )
        return 2.0 * instance.lipschitz + 2.0
    return float(spec)


def run_algorithm(
    algorithm: dict,
    instance: Instance | None,
    backend,
    total_budget: int,
    seed: int,
    parallelism: int = 1,
    dim: int | None = None,
) -> RunTrace:
    """Run one algorithm block against a prepared instance or backend."""
    name = algorithm["name"]
    resolved_dim = instance.dim if instance is not None else dim
    if resolved_dim is None:
        raise ConfigError("external runs need a 'dim'")
    if name == "blie":
        beta = float(algorithm.get("beta", 2.0))
        dz_default = 0.0
        if instance is not None and instance.dz is not None:
            dz_default = float(instance.dz)
        schedule = _build_schedule(
            algorithm.get("schedule", "doubling"),
            resolved_dim,
            beta,
            total_budget,
            dz_default,
        )
        config = BlieConfig(
            alpha=_resolve_alpha(algorithm.get("alpha", "theory"), instance),
            beta=beta,
            schedule=schedule,
            total_budget=total_budget,
            seed=seed,
            dim=None if instance is not None else resolved_dim,
        )
        return run_blie(config, instance, backend, parallelism)
    params = {k: v for k, v in algorithm.items() if k != "name"}
    config = BaselineConfig(
        name=name,
        total_budget=total_budget,
        seed=seed,
        dim=None if instance is not None else resolved_dim,
        params=params,
    )
    return run_baseline(config, instance, backend, parallelism)


def trace_to_row(run_id: str, trace: RunTrace) -> dict:
    """Flatten a trace into the CSV row schema (RESULT_FIELDS order)."""
    instance_name = trace.instance["name"] if trace.instance else "external"
    regret = trace.simple_regret
    return {
        "run_id": run_id,
        "algorithm": trace.algorithm,
        "instance": instance_name,
        "T": trace.total_budget,
        "seed": trace.seed,
        "batches": trace.batch_count,
        "total_spent": trace.total_spent,
        "best_loss": repr(trace.best_loss),
        "simple_regret": "" if regret is None else repr(regret),
        "wall_time_ms": trace.wall_time_ms,
    }


def write_results_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def run_single(config: ExperimentConfig, out_dir: Path | None = None) -> tuple[str, RunTrace, dict]:
    """Execute one run from a parsed config; returns (run_id, trace, row)."""
    parallelism = _effective_parallelism(config.parallelism)
    backend = None
    instance = None
    dim = None
    try:
        if config.instance is not None:
            instance = instance_from_descriptor(config.instance, default_seed=config.seed)
            backend = InProcessBackend(instance)
        else:
            ev = config.evaluator
            dim = int(ev["dim"])
            backend = ExternalEvaluator(
                list(ev["command"]),
                cwd=ev.get("cwd"),
                timeout_s=float(ev.get("timeout_s", 3600.0)),
            )
        trace = run_algorithm(
            config.algorithm,
            instance,
            backend,
            config.total_budget,
            config.seed,
            parallelism,
            dim=dim,
        )
    finally:
        if isinstance(backend, ExternalEvaluator):
            backend.close()
    inst_tag = instance.name if instance is not None else "external"
    run_id = (
        f"{config.algorithm['name']}-{inst_tag}-T{config.total_budget}-s{config.seed}"
    )
    row = trace_to_row(run_id, trace)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / f"trace-{run_id}.json", "w") as fh:
            json.dump(trace.to_dict(), fh, indent=2)
        write_results_csv(out_dir / "results.csv", [row])
    return run_id, trace, row


def crn_seed(base: int, total_budget: int, replicate: int) -> int:
    """Common-random-numbers seed shared by all algorithms at (T, replicate)."""
    return int(
        np.random.SeedSequence((base, total_budget, replicate)).generate_state(1)[0]
    )


def _slope_fit(t_values: list[int], means: list[float]) -> float | None:
    points = [
        (math.log2(t), math.log2(m)) for t, m in zip(t_values, means) if m > 0.0
    ]
    if len(points) < 2:
        return None
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    return float(np.polyfit(xs, ys, 1)[0])


def _summarize_cells(rows: list[dict]) -> dict:
    """Per (algorithm, T) mean/std of regret, plus a slope fit per algorithm."""
    cells: dict[tuple[str, int], list[float]] = {}
    for row in rows:
        if row["simple_regret"] == "" or row.get("failed"):
            continue
        key = (row["algorithm"], int(row["T"]))
        cells.setdefault(key, []).append(float(row["simple_regret"]))
    by_algo: dict[str, dict] = {}
    for (algo, t), regrets in sorted(cells.items()):
        arr = np.array(regrets)
        entry = by_algo.setdefault(algo, {"cells": []})
        entry["cells"].append(
            {
                "T": t,
                "n": len(regrets),
                "mean_regret": float(arr.mean()),
                "std_regret": float(arr.std(ddof=1)) if len(regrets) > 1 else 0.0,
            }
        )
    for algo, entry in by_algo.items():
        ts = [c["T"] for c in entry["cells"]]
        means = [c["mean_regret"] for c in entry["cells"]]
        entry["slope_log2_regret_vs_log2_T"] = _slope_fit(ts, means)
    return by_algo


def _toy_algorithm_block(name: str, args: dict) -> dict:
    if name == "blie":
        block = {"name": "blie", "alpha": args.get("alpha", "theory")}
        block["beta"] = args.get("beta", 2.0)
        block["schedule"] = args.get("schedule", "doubling")
        return block
    block = {"name": name}
    if "beta" in args:
        block["beta"] = args["beta"]
    return block


def bench_suite(
    suite: str,
    t_grid: list[int] | None = None,
    replicates: int = 64,
    algos: list[str] | None = None,
    dim: int = 2,
    variant: str = "mu1",
    sigma: float = 0.1,
    seed: int = 0,
    alpha="theory",
    beta: float = 2.0,
    parallelism: int = 1,
    run_cap: int = 1 << 26,
) -> dict:
    """Run a benchmark suite; returns {"rows": [...], "summary": {...}, "failures": n}.

    Suites:

    * ``toy``: the synthetic Gaussian-feedback instance at each T with every
      requested algorithm, common random numbers per (T, replicate).
    * ``adversary``: the grid-search trap instance; uniform search uses the
      trapped grid edge, the elimination optimizer runs on the same budgets.
    * ``schedules``: batch-count comparison of the doubling and the
      log-log-batch edge schedules (runs are skipped above ``run_cap`` but
      the schedule itself is always reported).
    """
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; expected one of {SUITES}")
    args = {"alpha": alpha, "beta": beta}
    rows: list[dict] = []
    failures = 0
    summary: dict = {"suite": suite, "replicates": replicates, "dim": dim}

    if suite == "toy":
        t_grid = t_grid or [2**12, 2**14, 2**16, 2**18, 2**20, 2**22]
        algos = algos or ["blie", "hyperband", "uniform", "random"]
        for t in t_grid:
            for rep in range(replicates):
                noise_seed = crn_seed(seed, t, rep)
                for name in algos:
                    instance = toy_instance(variant, dim, sigma=sigma, seed=noise_seed)
                    backend = InProcessBackend(instance)
                    block = _toy_algorithm_block(name, args)
                    run_id = f"{name}-{instance.name}-T{t}-rep{rep}"
                    try:
                        trace = run_algorithm(
                            block, instance, backend, t, noise_seed, parallelism
                        )
                        rows.append(trace_to_row(run_id, trace))
                    except BlieError as exc:
                        failures += 1
                        rows.append(_failed_row(run_id, name, instance.name, t, noise_seed, exc))
        summary["algorithms"] = _summarize_cells(rows)

    elif suite == "adversary":
        t_grid = t_grid or [2**12, 2**16, 2**20]
        algos = algos or ["uniform", "blie"]
        cells: dict = {}
        for t in t_grid:
            level = int(math.log2(t) // (dim + beta)) + 1
            r = 2.0 ** (-level)
            instance = uniform_search_adversary(dim, beta, t, r)
            threshold = 0.5 * t ** (-1.0 / (dim + beta))
            cell = {
                "T": t,
                "grid_level": level,
                "regime": instance.regime,
                "threshold": threshold,
            }
            for name in algos:
                regrets = []
                for rep in range(replicates):
                    noise_seed = crn_seed(seed, t, rep)
                    backend = InProcessBackend(instance)
                    if name == "uniform":
                        block = {"name": "uniform", "level": level}
                    else:
                        block = _toy_algorithm_block(name, args)
                    run_id = f"{name}-{instance.name}-rep{rep}"
                    try:
                        trace = run_algorithm(
                            block, instance, backend, t, noise_seed, parallelism
                        )
                        rows.append(trace_to_row(run_id, trace))
                        regrets.append(trace.simple_regret)
                    except BlieError as exc:
                        failures += 1
                        rows.append(
                            _failed_row(run_id, name, instance.name, t, noise_seed, exc)
                        )
                if regrets:
                    cell[name] = {
                        "mean_regret": float(np.mean(regrets)),
                        "min_regret": float(np.min(regrets)),
                        "max_regret": float(np.max(regrets)),
                    }
            if "uniform" in cell:
                cell["uniform_above_threshold"] = bool(
                    cell["uniform"]["min_regret"] >= threshold
                )
            cells[str(t)] = cell
        summary["cells"] = cells

    else:  # schedules
        t_grid = t_grid or [2**10, 2**20]
        base = toy_instance("mu1", dim, sigma=0.0, seed=seed)
        instance = certified_instance(base, "worst_up", seed=seed)
        dz = float(instance.dz or 0.0)
        cells = {}
        for t in t_grid:
            ace = ace_schedule(dim, dz, beta, t)
            cell = {
                "T": t,
                "ace_levels": list(ace.levels()),
                "ace_distinct_edges": len(list(ace.levels())),
            }
            if t <= run_cap:
                for kind in ("doubling", "ace"):
                    block = {
                        "name": "blie",
                        "alpha": "theory",
                        "beta": beta,
                        "schedule": kind,
                    }
                    backend = InProcessBackend(instance)
                    run_id = f"blie-{kind}-{instance.name}-T{t}"
                    try:
                        trace = run_algorithm(block, instance, backend, t, seed, parallelism)
                        rows.append(trace_to_row(run_id, trace))
                        cell[f"{kind}_batches"] = trace.batch_count
                    except BlieError as exc:
                        failures += 1
                        rows.append(
                            _failed_row(run_id, "blie", instance.name, t, seed, exc)
                        )
            cells[str(t)] = cell
        summary["cells"] = cells

    summary["failures"] = failures
    return {"rows": rows, "summary": summary, "failures": failures}


def _failed_row(run_id, algorithm, instance_name, t, seed, exc) -> dict:
    return {
        "run_id": run_id,
        "algorithm": algorithm,
        "instance": instance_name,
        "T": t,
        "seed": seed,
        "batches": 0,
        "total_spent": 0,
        "best_loss": "",
        "simple_regret": "",
        "wall_time_ms": 0,
        "failed": f"{type(exc).__name__}: {exc}",
    }


def _write_bench_outputs(out_dir: Path, result: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for row in result["rows"]:
        clean = {k: row.get(k, "") for k in RESULT_FIELDS}
        rows.append(clean)
    write_results_csv(out_dir / "results.csv", rows)
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(result["summary"], fh, indent=2)


# ---------------------------------------------------------------------------
# argparse plumbing
# ---------------------------------------------------------------------------


def _parse_list(text: str) -> list[str]:
    return [item for item in text.replace(",", " ").split() if item]


def _cmd_run(ns) -> int:
    try:
        with open(ns.config) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config {ns.config}: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(raw)
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(ns.out) if ns.out else Path(config.output_dir)
    try:
        run_id, trace, row = run_single(config, out_dir)
    except BlieError as exc:
        print(f"error: run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"run {run_id}: best_loss={trace.best_loss:.6g} "
          f"spent={trace.total_spent}/{trace.total_budget} "
          f"batches={trace.batch_count}")
    print(f"wrote {out_dir / ('trace-' + run_id + '.json')}")
    return 0


def _cmd_bench(ns) -> int:
    t_grid = [parse_budget(v) for v in _parse_list(ns.t_grid)] if ns.t_grid else None
    algos = _parse_list(ns.algos) if ns.algos else None
    alpha = ns.alpha if ns.alpha == "theory" else float(ns.alpha)
    replicates = ns.replicates
    dim = ns.dim
    if ns.full_scale:
        dim = 8
        replicates = 256
        t_grid = t_grid or [2**16, 2**20, 2**24, 2**28]
    try:
        result = bench_suite(
            ns.suite,
            t_grid=t_grid,
            replicates=replicates,
            algos=algos,
            dim=dim,
            variant=ns.variant,
            sigma=ns.sigma,
            seed=ns.seed,
            alpha=alpha,
            beta=ns.beta,
            parallelism=_effective_parallelism(ns.parallelism),
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(ns.out)
    _write_bench_outputs(out_dir, result)
    print(f"wrote {out_dir / 'results.csv'} ({len(result['rows'])} rows) "
          f"and {out_dir / 'summary.json'}")
    if result["failures"]:
        print(f"{result['failures']} cell(s) failed", file=sys.stderr)
        return 1
    return 0


def _cmd_zoom(ns) -> int:
    try:
        desc = json.loads(ns.instance)
    except json.JSONDecodeError as exc:
        print(f"error: --instance is not valid JSON: {exc}", file=sys.stderr)
        return 2
    try:
        instance = instance_from_descriptor(desc)
        r_values = [float(v) for v in _parse_list(ns.r)]
        stats = fit_zooming_dimension(instance, r_values)
    except BlieError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"instance: {instance.name} (dim={instance.dim})")
    print(f"{'edge':>12}  {'count':>10}")
    for r, count in zip(stats.edge_lengths, stats.counts):
        print(f"{r:>12.6g}  {count:>10d}")
    print(f"fitted exponent: {stats.fitted_dz:.6g}")
    print(f"fitted constant: {stats.fitted_cz:.6g}")
    print(json.dumps(stats.to_dict()))
    if ns.out:
        out_dir = Path(ns.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "zoom.json", "w") as fh:
            json.dump(stats.to_dict(), fh, indent=2)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blie",
        description="Budget-constrained batched optimization experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one optimization run from a JSON config")
    p_run.add_argument("--config", required=True, help="path to the config file")
    p_run.add_argument("--out", default=None, help="output directory override")
    p_run.set_defaults(func=_cmd_run)

    p_bench = sub.add_parser("bench", help="factorial benchmark suite")
    p_bench.add_argument("--suite", required=True, choices=SUITES)
    p_bench.add_argument("--t-grid", default=None,
                         help="comma list of budgets (2^k accepted)")
    p_bench.add_argument("--replicates", type=int, default=64)
    p_bench.add_argument("--algos", default=None, help="comma list of algorithms")
    p_bench.add_argument("--dim", type=int, default=2)
    p_bench.add_argument("--variant", default="mu1", choices=("mu1", "mu2"))
    p_bench.add_argument("--sigma", type=float, default=0.1)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--alpha", default="theory",
                         help="elimination width ('theory' = 2L+2)")
    p_bench.add_argument("--beta", type=float, default=2.0)
    p_bench.add_argument("--parallelism", type=int, default=1)
    p_bench.add_argument("--full-scale", action="store_true",
                         help="paper-scale defaults: dim 8, 256 replicates")
    p_bench.add_argument("--out", required=True, help="output directory")
    p_bench.set_defaults(func=_cmd_bench)

    p_zoom = sub.add_parser("zoom", help="near-optimal cube counts and scaling fit")
    p_zoom.add_argument("--instance", required=True,
                        help="instance descriptor as JSON")
    p_zoom.add_argument("--r", required=True, help="comma list of edge lengths")
    p_zoom.add_argument("--out", default=None, help="directory for zoom.json")
    p_zoom.set_defaults(func=_cmd_zoom)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
