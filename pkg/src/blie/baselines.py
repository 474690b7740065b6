"""Comparison algorithms sharing the instance and executor interfaces.

Four searchers are provided, all returning the same :class:`RunTrace` type
as the cube-elimination optimizer so the CLI and the bench suites treat them
interchangeably:

``uniform``
    One-shot grid search: partition the domain into cubes of a fixed edge,
    play one uniform arm per cube with the budget split evenly, output the
    argmin. A single executor batch.
``random``
    Sample N arms uniformly at random. Policy "even" splits the budget
    evenly in one batch; policy "sh" runs successive halving over the
    sampled arms.
``sh``
    Successive halving over N fresh random arms: geometrically shrink the
    survivor set, topping survivors up each round, equal spend per round.
``hyperband``
    The standard bracket structure over successive halving, truncated when
    the total budget runs out.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import Candidate, RunTrace
from .errors import BudgetTooSmallError, InvalidArgumentError
from .executor import EvalRequest, run_batch
from .geometry import Cube, dyadic_level, level_cubes, sample_point
from .instances import Instance

__all__ = [
    "BaselineConfig",
    "hyperband",
    "hyperband_brackets",
    "random_search",
    "run_baseline",
    "successive_halving",
    "uniform_search",
]

BASELINE_NAMES = ("uniform", "random", "sh", "hyperband")


@dataclass(frozen=True)
class BaselineConfig:
    """Inputs for one baseline run.

    ``params`` is algorithm-specific: uniform takes ``level`` (grid edge
    ``2**-level``; default balances grid size against per-arm budget using
    ``beta``); random takes ``n_arms`` and ``policy`` ("even" or "sh");
    sh takes ``n_arms`` and ``eta``; hyperband takes ``eta`` and ``R``
    (default: the largest power of eta whose full bracket set fits in T).
    ``dim`` is required when no instance is supplied.
    """

    name: str
    total_budget: int
    seed: int = 0
    dim: int | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in BASELINE_NAMES:
            raise InvalidArgumentError(
                f"unknown baseline {self.name!r}; expected one of {BASELINE_NAMES}"
            )
        if self.total_budget < 1:
            raise InvalidArgumentError(
                f"total budget must be a positive integer, got {self.total_budget}"
            )
        if self.dim is not None and self.dim < 1:
            raise InvalidArgumentError(f"dim must be >= 1, got {self.dim}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "total_budget": self.total_budget,
            "seed": self.seed,
            "dim": self.dim,
            "params": dict(self.params),
        }


def _resolve_dim(config: BaselineConfig, instance: Instance | None) -> int:
    if instance is not None:
        if config.dim is not None and config.dim != instance.dim:
            raise InvalidArgumentError(
                f"config dim {config.dim} does not match instance dim {instance.dim}"
            )
        return instance.dim
    if config.dim is None:
        raise InvalidArgumentError("need an instance or an explicit config dim")
    return config.dim


def _regret(instance: Instance | None, arm: tuple[float, ...]) -> float | None:
    if instance is None or instance.optimum is None:
        return None
    return instance.mu(arm) - instance.optimum[1]


def _trace(
    config: BaselineConfig,
    instance: Instance | None,
    *,
    batch_count: int,
    total_spent: int,
    candidates: tuple[Candidate, ...],
    best_index: int,
    batches: tuple,
    started: float,
    notes: dict | None = None,
) -> RunTrace:
    best = candidates[best_index]
    elapsed_ms = max(0, int(round((time.perf_counter() - started) * 1000.0)))
    return RunTrace(
        algorithm=config.name,
        instance=instance.descriptor() if instance is not None else None,
        params=config.to_dict(),
        total_budget=config.total_budget,
        seed=config.seed,
        batch_count=batch_count,
        total_spent=total_spent,
        leftover=config.total_budget - total_spent,
        cleanup_budget=0,
        candidates=candidates,
        best_arm=best.arm,
        best_loss=best.loss,
        simple_regret=_regret(instance, best.arm),
        batches=batches,
        wall_time_ms=elapsed_ms,
        notes=notes or {},
    )


def _sample_arms(rng: np.random.Generator, count: int, dim: int) -> list[tuple[float, ...]]:
    draws = rng.random((count, dim))
    return [tuple(row) for row in draws]


def _whole_domain(dim: int) -> Cube:
    return Cube(0, (0,) * dim)


def uniform_search(
    config: BaselineConfig,
    instance: Instance | None,
    backend,
    parallelism: int = 1,
) -> RunTrace:
    """One-shot grid search at a fixed dyadic edge length.

    The grid has ``2 ** (level * dim)`` cubes and each cube's single arm gets
    ``floor(T / #cubes)`` evaluations in one batch. The default level spends
    about ``T ** (beta / (dim + beta))`` per arm, the balance point between
    grid resolution and per-arm accuracy.
    """
    started = time.perf_counter()
    dim = _resolve_dim(config, instance)
    beta = float(config.params.get("beta", 2.0))
    if "r" in config.params:
        level = dyadic_level(float(config.params["r"]))
    elif "level" in config.params:
        level = int(config.params["level"])
    else:
        level = max(1, round(math.log2(config.total_budget) / (dim + beta)))
    if level < 1:
        raise InvalidArgumentError(f"grid level must be >= 1, got {level}")
    cubes = list(level_cubes(dim, level))
    n = config.total_budget // len(cubes)
    if n < 1:
        raise BudgetTooSmallError(
            f"{len(cubes)} grid cubes need at least one evaluation each but "
            f"the total budget is {config.total_budget}",
            minimum_feasible=len(cubes),
        )
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, dim, level)))
    arms = [tuple(sample_point(cube, rng)) for cube in cubes]
    requests = [EvalRequest(i, arm, n, 0) for i, arm in enumerate(arms)]
    results = run_batch(requests, backend, parallelism)
    candidates = tuple(
        Candidate(cube, arm, n, res.loss)
        for cube, arm, res in zip(cubes, arms, results)
    )
    best = min(
        range(len(candidates)),
        key=lambda i: (candidates[i].loss, candidates[i].cube.coords),
    )
    batch = {
        "index": 1,
        "level": level,
        "budget_per_arm": n,
        "arm_count": len(arms),
        "cost": len(arms) * n,
    }
    return _trace(
        config,
        instance,
        batch_count=1,
        total_spent=len(arms) * n,
        candidates=candidates,
        best_index=best,
        batches=(batch,),
        started=started,
        notes={
            "chosen_cube": {
                "level": level,
                "coords": list(candidates[best].cube.coords),
            }
        },
    )


def _rank(order_losses: list[float]) -> list[int]:
    """Indices sorted by loss, ties broken by position (stable)."""
    return sorted(range(len(order_losses)), key=lambda i: (order_losses[i], i))


def _sh_rounds(n_arms: int, eta: int) -> int:
    rounds = 1
    while eta**rounds < n_arms:
        rounds += 1
    return rounds


def _run_sh_over_arms(
    arms: list[tuple[float, ...]],
    eta: int,
    total_budget: int,
    backend,
    parallelism: int,
    dim: int,
) -> tuple[list[Candidate], int, int, list[dict]]:
    """Successive halving over a fixed arm list.

    Round k keeps the best ``ceil(N / eta**k)`` arms and tops each up to a
    cumulative budget of ``floor(T / (kept_k * rounds))``, one executor batch
    per round, so every round spends at most ``T / rounds``. Returns the
    final survivors as candidates, the spend, the batch count, and per-round
    records.
    """
    n_arms = len(arms)
    rounds = _sh_rounds(n_arms, eta)
    first_budget = total_budget // (n_arms * rounds)
    if first_budget < 1:
        raise BudgetTooSmallError(
            f"{n_arms} arms over {rounds} rounds need at least "
            f"{n_arms * rounds} evaluations but the total budget is {total_budget}",
            minimum_feasible=n_arms * rounds,
        )
    cube = _whole_domain(dim)
    keep = list(range(n_arms))
    budgets = [0] * n_arms
    losses = [math.inf] * n_arms
    spent = 0
    batches = 0
    records: list[dict] = []
    request_id = 0
    for k in range(rounds):
        target = total_budget // (len(keep) * rounds)
        cost = 0
        if target > budgets[keep[0]]:
            requests = []
            for i in keep:
                requests.append(
                    EvalRequest(request_id, arms[i], target, budgets[i])
                )
                request_id += 1
            results = run_batch(requests, backend, parallelism)
            for i, res in zip(keep, results):
                cost += target - budgets[i]
                budgets[i] = target
                losses[i] = res.loss
            spent += cost
            batches += 1
        records.append(
            {
                "index": k + 1,
                "arm_count": len(keep),
                "budget_per_arm": target,
                "cost": cost,
            }
        )
        if k + 1 < rounds:
            keep_next = -(-n_arms // eta ** (k + 1))
            ranked = sorted(keep, key=lambda i: (losses[i], i))
            keep = sorted(ranked[:keep_next])
    candidates = [Candidate(cube, arms[i], budgets[i], losses[i]) for i in keep]
    return candidates, spent, batches, records


def random_search(
    config: BaselineConfig,
    instance: Instance | None,
    backend,
    parallelism: int = 1,
) -> RunTrace:
    """Search over N uniformly sampled arms.

    Policy "even" (default) gives every arm ``floor(T / N)`` evaluations in
    one batch and outputs the argmin. Policy "sh" runs successive halving
    over the same sampled arms (params ``eta``, default 2). The default N
    grows like ``T ** (dim / (dim + beta))``, the allocation that balances
    covering the domain against estimating each arm.
    """
    started = time.perf_counter()
    dim = _resolve_dim(config, instance)
    beta = float(config.params.get("beta", 2.0))
    policy = config.params.get("policy", "even")
    if policy not in ("even", "sh"):
        raise InvalidArgumentError(f"unknown random-search policy {policy!r}")
    default_n = max(1, round(config.total_budget ** (dim / (dim + beta))))
    n_arms = int(config.params.get("n_arms", default_n))
    if not (1 <= n_arms <= config.total_budget):
        raise InvalidArgumentError(
            f"n_arms must lie in [1, T]; got {n_arms} with T={config.total_budget}"
        )
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, dim, n_arms)))
    arms = _sample_arms(rng, n_arms, dim)

    if policy == "sh" and n_arms > 1:
        eta = int(config.params.get("eta", 2))
        if eta < 2:
            raise InvalidArgumentError(f"eta must be >= 2, got {eta}")
        candidates, spent, batches, records = _run_sh_over_arms(
            arms, eta, config.total_budget, backend, parallelism, dim
        )
        best = min(
            range(len(candidates)), key=lambda i: (candidates[i].loss, i)
        )
        return _trace(
            config,
            instance,
            batch_count=batches,
            total_spent=spent,
            candidates=tuple(candidates),
            best_index=best,
            batches=tuple(records),
            started=started,
        )

    n = config.total_budget // n_arms
    requests = [EvalRequest(i, arm, n, 0) for i, arm in enumerate(arms)]
    results = run_batch(requests, backend, parallelism)
    cube = _whole_domain(dim)
    candidates = tuple(
        Candidate(cube, arm, n, res.loss) for arm, res in zip(arms, results)
    )
    best = min(range(len(candidates)), key=lambda i: (candidates[i].loss, i))
    batch = {
        "index": 1,
        "arm_count": n_arms,
        "budget_per_arm": n,
        "cost": n_arms * n,
    }
    return _trace(
        config,
        instance,
        batch_count=1,
        total_spent=n_arms * n,
        candidates=candidates,
        best_index=best,
        batches=(batch,),
        started=started,
    )


def successive_halving(
    config: BaselineConfig,
    instance: Instance | None,
    backend,
    parallelism: int = 1,
) -> RunTrace:
    """Successive halving over N fresh random arms (params n_arms, eta)."""
    started = time.perf_counter()
    dim = _resolve_dim(config, instance)
    eta = int(config.params.get("eta", 2))
    if eta < 2:
        raise InvalidArgumentError(f"eta must be >= 2, got {eta}")
    beta = float(config.params.get("beta", 2.0))
    default_n = max(eta, round(config.total_budget ** (dim / (dim + beta))))
    n_arms = int(config.params.get("n_arms", default_n))
    if n_arms < eta:
        raise InvalidArgumentError(
            f"n_arms ({n_arms}) must be at least eta ({eta})"
        )
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, dim, n_arms)))
    arms = _sample_arms(rng, n_arms, dim)
    candidates, spent, batches, records = _run_sh_over_arms(
        arms, eta, config.total_budget, backend, parallelism, dim
    )
    best = min(range(len(candidates)), key=lambda i: (candidates[i].loss, i))
    return _trace(
        config,
        instance,
        batch_count=batches,
        total_spent=spent,
        candidates=tuple(candidates),
        best_index=best,
        batches=tuple(records),
        started=started,
    )


def hyperband_brackets(R: int, eta: int) -> list[dict]:
    """The bracket table for max per-arm budget R and elimination factor eta.

    Bracket s (from ``s_max = max{s : eta**s <= R}`` down to 0) starts
    ``ceil((s_max + 1) / (s + 1) * eta**s)`` arms at a per-arm budget of
    ``floor(R * eta**-s)`` and runs s halving rounds; round i of bracket s
    plays ``floor(n_s * eta**-i)`` arms at cumulative per-arm budget
    ``floor(R * eta**(i - s))`` (at least 1). All arithmetic is exact.
    """
    if eta < 2:
        raise InvalidArgumentError(f"eta must be >= 2, got {eta}")
    if R < eta:
        raise InvalidArgumentError(f"R must be >= eta, got R={R}, eta={eta}")
    s_max = 0
    while eta ** (s_max + 1) <= R:
        s_max += 1
    table = []
    for s in range(s_max, -1, -1):
        numer = (s_max + 1) * eta**s
        n_s = -(-numer // (s + 1))
        rounds = []
        for i in range(s + 1):
            arm_count = n_s // eta**i
            budget = max(1, (R * eta**i) // eta**s)
            rounds.append({"round": i, "arm_count": arm_count, "budget": budget})
        table.append({"s": s, "n_arms": n_s, "min_budget": rounds[0]["budget"], "rounds": rounds})
    return table


def hyperband(
    config: BaselineConfig,
    instance: Instance | None,
    backend,
    parallelism: int = 1,
) -> RunTrace:
    """Bracketed successive halving with a hard total-budget cap.

    Brackets run from the most exploratory (many arms, tiny budgets) to the
    least; within a bracket each round tops survivors up to the round's
    cumulative budget. When the remaining total budget cannot cover a round,
    every arm in that round gets an equal share of what is left and the run
    stops (recorded under ``notes["truncated"]``). The output is the arm
    with the lowest last observed loss across all brackets.
    """
    started = time.perf_counter()
    dim = _resolve_dim(config, instance)
    eta = int(config.params.get("eta", 3))
    if eta < 2:
        raise InvalidArgumentError(f"eta must be >= 2, got {eta}")
    if "R" in config.params:
        R = int(config.params["R"])
    else:
        R = _default_hyperband_r(config.total_budget, eta)
    if R > config.total_budget:
        raise BudgetTooSmallError(
            f"max per-arm budget R={R} exceeds the total budget "
            f"{config.total_budget}",
            minimum_feasible=R,
        )
    table = hyperband_brackets(R, eta)
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, dim, eta, R)))
    cube = _whole_domain(dim)

    remaining = config.total_budget
    spent = 0
    batches = 0
    records: list[dict] = []
    finished: list[Candidate] = []
    truncated = False
    request_id = 0

    for bracket in table:
        arms = _sample_arms(rng, bracket["n_arms"], dim)
        budgets = [0] * len(arms)
        losses = [math.inf] * len(arms)
        keep = list(range(len(arms)))
        for spec_round in bracket["rounds"]:
            count = spec_round["arm_count"]
            target = spec_round["budget"]
            ranked = sorted(keep, key=lambda i: (losses[i], i))
            keep = sorted(ranked[:count])
            prior = budgets[keep[0]]
            per_arm = target - prior
            if per_arm <= 0:
                continue
            full_cost = per_arm * len(keep)
            if full_cost > remaining:
                per_arm = remaining // len(keep)
                truncated = True
                if per_arm == 0:
                    break
                target = prior + per_arm
            requests = []
            for i in keep:
                requests.append(EvalRequest(request_id, arms[i], target, budgets[i]))
                request_id += 1
            results = run_batch(requests, backend, parallelism)
            for i, res in zip(keep, results):
                budgets[i] = target
                losses[i] = res.loss
            cost = per_arm * len(keep)
            spent += cost
            remaining -= cost
            batches += 1
            records.append(
                {
                    "bracket": bracket["s"],
                    "round": spec_round["round"],
                    "arm_count": len(keep),
                    "budget_per_arm": target,
                    "cost": cost,
                }
            )
            if truncated:
                break
        finished.extend(
            Candidate(cube, arms[i], budgets[i], losses[i])
            for i in range(len(arms))
            if budgets[i] > 0
        )
        if truncated:
            break

    if not finished:
        raise BudgetTooSmallError(
            f"hyperband could not complete any round within budget "
            f"{config.total_budget}",
            minimum_feasible=table[0]["n_arms"],
        )
    best = min(range(len(finished)), key=lambda i: (finished[i].loss, i))
    return _trace(
        config,
        instance,
        batch_count=batches,
        total_spent=spent,
        candidates=tuple(finished),
        best_index=best,
        batches=tuple(records),
        started=started,
        notes={"R": R, "eta": eta, "truncated": truncated},
    )


def _default_hyperband_r(total_budget: int, eta: int) -> int:
    """Largest power of eta whose full bracket table fits in the budget."""
    best = eta
    power = eta
    while power <= total_budget:
        cost = _bracket_table_cost(power, eta)
        if cost <= total_budget:
            best = power
        power *= eta
    return best


def _bracket_table_cost(R: int, eta: int) -> int:
    total = 0
    for bracket in hyperband_brackets(R, eta):
        n_arms = bracket["n_arms"]
        budgets = [0] * n_arms
        keep = n_arms
        for spec_round in bracket["rounds"]:
            keep = spec_round["arm_count"]
            per_arm = spec_round["budget"] - budgets[0]
            if per_arm > 0:
                total += per_arm * keep
                for i in range(keep):
                    budgets[i] = spec_round["budget"]
    return total


def run_baseline(
    config: BaselineConfig,
    instance: Instance | None,
    backend,
    parallelism: int = 1,
) -> RunTrace:
    """Dispatch to the baseline named in the config."""
    runner = {
        "uniform": uniform_search,
        "random": random_search,
        "sh": successive_halving,
        "hyperband": hyperband,
    }[config.name]
    return runner(config, instance, backend, parallelism)
