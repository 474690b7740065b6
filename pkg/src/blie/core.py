"""Batched elimination search over dyadic cubes.

The optimizer maintains a set of active cubes at a common edge length r_m.
Each batch plays one uniformly sampled arm per active cube at a per-arm
budget of ``ceil(r_m ** -beta)``, then eliminates every cube whose observed
loss exceeds the batch minimum by more than ``alpha * r_m``. Survivors are
split into children at the next edge length of the schedule and the loop
repeats until the projected cost of the next batch would push cumulative
spend past the total budget T (or the schedule runs out). The survivors'
arms become the candidate set: whatever budget remains is split evenly among
them as a top-up, and the arm with the lowest final loss is returned, ties
broken toward the lexicographically smallest cube.

Budget accounting is exact and conservative: ``total_spent`` counts actual
evaluations, the stop rule uses the projected cost of the *next* batch, and
the clean-up spends ``floor(remaining / #candidates)`` per candidate, so a
run can never exceed T. The leftover (at most #candidates - 1 units) is
discarded and recorded in the trace.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BatchFailedError,
    BudgetTooSmallError,
    InvalidArgumentError,
    InvalidLossError,
)
from .executor import EvalRequest, run_batch
from .geometry import (
    Cube,
    EdgeLengthSchedule,
    dyadic_level,
    level_cubes,
    partition,
    sample_point,
)
from .instances import Instance

__all__ = [
    "BatchRecord",
    "BlieConfig",
    "Candidate",
    "RunTrace",
    "arm_budget",
    "cleanup",
    "eliminate",
    "next_grid_point",
    "run_blie",
]


@dataclass(frozen=True)
class BlieConfig:
    """Inputs of one optimizer run.

    ``alpha`` is the elimination width multiplier (the certified-noise theory
    wants ``2 L + 2``; small values like 0.01 are the aggressive practical
    choice). ``beta`` sets the per-arm budget ``ceil(r ** -beta)`` and the
    noise decay ``n ** (-1/beta)``. ``dim`` may be omitted when the instance
    is given alongside the config; it is required for external evaluators.
    """

    alpha: float
    beta: float
    schedule: EdgeLengthSchedule
    total_budget: int
    seed: int = 0
    dim: int | None = None

    def __post_init__(self):
        if not (self.alpha > 0.0) or not math.isfinite(self.alpha):
            raise InvalidArgumentError(f"alpha must be positive, got {self.alpha}")
        if not (self.beta > 0.0) or not math.isfinite(self.beta):
            raise InvalidArgumentError(f"beta must be positive, got {self.beta}")
        if self.total_budget < 1:
            raise InvalidArgumentError(
                f"total budget must be a positive integer, got {self.total_budget}"
            )
        if self.dim is not None and self.dim < 1:
            raise InvalidArgumentError(f"dim must be >= 1, got {self.dim}")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "schedule": self.schedule.describe(),
            "total_budget": self.total_budget,
            "seed": self.seed,
            "dim": self.dim,
        }


@dataclass(frozen=True)
class BatchRecord:
    """Everything observed and decided in one batch.

    ``survivors`` and ``eliminated`` index into ``cubes``; ``grid_point`` is
    the cumulative spend through this batch; ``projected_next`` is the spend
    the next batch would have reached (None when the schedule was exhausted
    first) and drives the stop rule.
    """

    index: int
    level: int
    edge_length: float
    budget_per_arm: int
    cubes: tuple[Cube, ...]
    arms: tuple[tuple[float, ...], ...]
    losses: tuple[float, ...]
    min_loss: float
    survivors: tuple[int, ...]
    eliminated: tuple[int, ...]
    cost: int
    grid_point: int
    projected_next: int | None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "level": self.level,
            "edge_length": self.edge_length,
            "budget_per_arm": self.budget_per_arm,
            "cubes": [{"level": c.level, "coords": list(c.coords)} for c in self.cubes],
            "arms": [list(a) for a in self.arms],
            "losses": list(self.losses),
            "min_loss": self.min_loss,
            "survivors": list(self.survivors),
            "eliminated": list(self.eliminated),
            "cost": self.cost,
            "grid_point": self.grid_point,
            "projected_next": self.projected_next,
        }


@dataclass(frozen=True)
class Candidate:
    """A final-round arm: its cube, final cumulative budget, and final loss."""

    cube: Cube
    arm: tuple[float, ...]
    budget: int
    loss: float

    def to_dict(self) -> dict:
        return {
            "cube": {"level": self.cube.level, "coords": list(self.cube.coords)},
            "arm": list(self.arm),
            "budget": self.budget,
            "loss": self.loss,
        }


@dataclass
class RunTrace:
    """Complete record of one optimization run (any algorithm in this package)."""

    algorithm: str
    instance: dict | None
    params: dict
    total_budget: int
    seed: int
    batch_count: int
    total_spent: int
    leftover: int
    cleanup_budget: int
    candidates: tuple[Candidate, ...]
    best_arm: tuple[float, ...]
    best_loss: float
    simple_regret: float | None
    batches: tuple = ()
    wall_time_ms: int = 0
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "instance": self.instance,
            "params": self.params,
            "total_budget": self.total_budget,
            "seed": self.seed,
            "batch_count": self.batch_count,
            "total_spent": self.total_spent,
            "leftover": self.leftover,
            "cleanup_budget": self.cleanup_budget,
            "candidates": [c.to_dict() for c in self.candidates],
            "best_arm": list(self.best_arm),
            "best_loss": self.best_loss,
            "simple_regret": self.simple_regret,
            "batches": [
                b.to_dict() if hasattr(b, "to_dict") else b for b in self.batches
            ],
            "wall_time_ms": self.wall_time_ms,
            "notes": self.notes,
        }


def arm_budget(level: int, beta: float) -> int:
    """Per-arm budget at edge length ``2**-level``: ``ceil(r ** -beta)``.

    The exponent ``level * beta`` is handled exactly when it is an integer,
    so power-of-two budgets stay exact at any scale.
    """
    if level < 0:
        raise InvalidArgumentError(f"level must be >= 0, got {level}")
    exponent = level * beta
    if float(exponent).is_integer():
        return 1 << int(round(exponent))
    return math.ceil(2.0**exponent)


def eliminate(
    losses: Sequence[float], alpha: float, edge_length: float
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Partition cube indices into (survivors, eliminated).

    A cube survives iff its loss is within ``alpha * edge_length`` of the
    batch minimum; the comparison is strict, so the argmin always survives
    and an exactly-at-threshold loss survives too.
    """
    if len(losses) == 0:
        raise InvalidArgumentError("cannot eliminate over an empty batch")
    for pos, value in enumerate(losses):
        if not math.isfinite(value):
            raise InvalidLossError(f"cube {pos} has a non-finite loss: {value!r}")
    floor = min(losses)
    width = alpha * edge_length
    survivors = tuple(i for i, v in enumerate(losses) if v - floor <= width)
    eliminated = tuple(i for i, v in enumerate(losses) if v - floor > width)
    return survivors, eliminated


def next_grid_point(
    t_m: int,
    edge_now: float,
    edge_next: float,
    survivors: int,
    budget_next: int,
    dim: int,
) -> int:
    """Projected cumulative spend if the next batch runs.

    ``t_m + (edge_now / edge_next) ** dim * survivors * budget_next``,
    evaluated in exact integer arithmetic (the edge ratio is a power of two).
    """
    level_now = dyadic_level(edge_now)
    level_next = dyadic_level(edge_next)
    if level_next <= level_now:
        raise InvalidArgumentError(
            f"next edge {edge_next} must be smaller than current edge {edge_now}"
        )
    if survivors < 1:
        raise InvalidArgumentError(f"survivor count must be >= 1, got {survivors}")
    if budget_next < 1:
        raise InvalidArgumentError(f"next budget must be >= 1, got {budget_next}")
    if dim < 1:
        raise InvalidArgumentError(f"dim must be >= 1, got {dim}")
    children_per_cube = 1 << ((level_next - level_now) * dim)
    return t_m + children_per_cube * survivors * budget_next


def cleanup(
    candidates: Sequence[Candidate],
    remaining: int,
    backend,
    parallelism: int = 1,
    next_request_id: int = 0,
) -> tuple[tuple[Candidate, ...], int, int, int]:
    """Spend the remaining budget evenly over the candidate arms.

    Each arm is topped up from its current budget to ``budget + n_f`` with
    ``n_f = floor(remaining / #candidates)``; with ``n_f = 0`` no evaluation
    happens and the existing losses decide. Returns the updated candidates,
    the chosen index (argmin of final losses, ties toward the cube with the
    lexicographically smallest coordinates), ``n_f``, and the discarded
    leftover ``remaining - n_f * #candidates``.
    """
    if len(candidates) == 0:
        raise InvalidArgumentError("cleanup needs at least one candidate")
    if remaining < 0:
        raise InvalidArgumentError(f"remaining budget must be >= 0, got {remaining}")
    n_f = remaining // len(candidates)
    if n_f > 0:
        requests = [
            EvalRequest(
                request_id=next_request_id + i,
                point=c.arm,
                cumulative_budget=c.budget + n_f,
                prior_budget=c.budget,
            )
            for i, c in enumerate(candidates)
        ]
        results = run_batch(requests, backend, parallelism)
        final = tuple(
            Candidate(c.cube, c.arm, c.budget + n_f, res.loss)
            for c, res in zip(candidates, results)
        )
    else:
        final = tuple(candidates)
    best = min(range(len(final)), key=lambda i: (final[i].loss, final[i].cube.coords))
    leftover = remaining - n_f * len(final)
    return final, best, n_f, leftover


def run_blie(
    config: BlieConfig,
    instance: Instance | None,
    backend,
    parallelism: int = 1,
) -> RunTrace:
    """Run the batched elimination loop end to end and return its trace.

    ``instance`` supplies the dimension and, when it has a known optimum,
    the reported simple regret. It may be None for external evaluators, in
    which case ``config.dim`` is required and regret is not reported. The
    backend only ever sees whole batches; no loss influences any decision
    before its batch completes.
    """
    started = time.perf_counter()
    if instance is not None:
        dim = instance.dim
        if config.dim is not None and config.dim != dim:
            raise InvalidArgumentError(
                f"config dim {config.dim} does not match instance dim {dim}"
            )
    elif config.dim is not None:
        dim = config.dim
    else:
        raise InvalidArgumentError("need an instance or an explicit config dim")

    rng = np.random.default_rng(np.random.SeedSequence((config.seed, dim)))
    total_budget = config.total_budget
    levels = iter(config.schedule.levels())
    level = next(levels, None)
    if level is None:
        raise InvalidArgumentError("schedule yields no edge lengths")

    first_budget = arm_budget(level, config.beta)
    first_cost = (1 << (level * dim)) * first_budget
    if first_cost > total_budget:
        raise BudgetTooSmallError(
            f"first batch needs {first_cost} evaluations "
            f"({2 ** (level * dim)} cubes at budget {first_budget}) but the "
            f"total budget is {total_budget}",
            minimum_feasible=first_cost,
        )

    active = list(level_cubes(dim, level))
    budget_now = first_budget
    spent = 0
    request_id = 0
    records: list[BatchRecord] = []
    batch_index = 0

    while True:
        batch_index += 1
        arms = [tuple(sample_point(cube, rng)) for cube in active]
        requests = [
            EvalRequest(request_id + i, arm, budget_now, 0)
            for i, arm in enumerate(arms)
        ]
        request_id += len(requests)
        try:
            results = run_batch(requests, backend, parallelism)
        except BatchFailedError as exc:
            raise BatchFailedError(
                f"batch {batch_index}: {exc}", request_id=exc.request_id
            ) from (exc.__cause__ or exc)
        losses = [res.loss for res in results]
        spent += len(active) * budget_now
        survivors, eliminated = eliminate(losses, config.alpha, 2.0**-level)

        next_level = next(levels, None)
        if next_level is None:
            projected = None
        else:
            budget_next = arm_budget(next_level, config.beta)
            projected = next_grid_point(
                spent, 2.0**-level, 2.0**-next_level, len(survivors), budget_next, dim
            )

        records.append(
            BatchRecord(
                index=batch_index,
                level=level,
                edge_length=2.0**-level,
                budget_per_arm=budget_now,
                cubes=tuple(active),
                arms=tuple(arms),
                losses=tuple(losses),
                min_loss=min(losses),
                survivors=survivors,
                eliminated=eliminated,
                cost=len(active) * budget_now,
                grid_point=spent,
                projected_next=projected,
            )
        )

        if projected is None or projected >= total_budget:
            candidates = tuple(
                Candidate(active[i], arms[i], budget_now, losses[i]) for i in survivors
            )
            break

        active = [
            child for i in survivors for child in partition(active[i], next_level)
        ]
        level = next_level
        budget_now = budget_next

    final, best, n_f, leftover = cleanup(
        candidates,
        total_budget - spent,
        backend,
        parallelism=parallelism,
        next_request_id=request_id,
    )
    spent += n_f * len(final)
    batch_count = len(records) + (1 if n_f > 0 else 0)

    best_arm = final[best].arm
    regret = None
    if instance is not None and instance.optimum is not None:
        regret = instance.mu(best_arm) - instance.optimum[1]

    elapsed_ms = max(0, int(round((time.perf_counter() - started) * 1000.0)))
    return RunTrace(
        algorithm="blie",
        instance=instance.descriptor() if instance is not None else None,
        params=config.to_dict(),
        total_budget=total_budget,
        seed=config.seed,
        batch_count=batch_count,
        total_spent=spent,
        leftover=leftover,
        cleanup_budget=n_f,
        candidates=final,
        best_arm=best_arm,
        best_loss=final[best].loss,
        simple_regret=regret,
        batches=tuple(records),
        wall_time_ms=elapsed_ms,
    )
