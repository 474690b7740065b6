from __future__ import annotations

import math

import pytest

from blie.core import (
    BlieConfig,
    Candidate,
    arm_budget,
    cleanup,
    eliminate,
    next_grid_point,
    run_blie,
)
from blie.errors import (
    BudgetTooSmallError,
    InvalidArgumentError,
    InvalidLossError,
)
from blie.executor import EvalRequest, InProcessBackend, in_process_backend
from blie.geometry import Cube, doubling_schedule, explicit_schedule
from blie.instances import (
    certified_instance,
    constant_instance,
    toy_instance,
)


# ---------------------------------------------------------------------------
# arm budgets
# ---------------------------------------------------------------------------


def test_arm_budget_powers_of_two():
    assert arm_budget(0, 2.0) == 1
    assert arm_budget(3, 2.0) == 64
    assert arm_budget(5, 2.0) == 1024
    assert arm_budget(2, 1.0) == 4


def test_arm_budget_exact_at_large_levels():
    assert arm_budget(40, 2.0) == 1 << 80


def test_arm_budget_fractional_exponent_ceils():
    assert arm_budget(3, 2.5) == 182  # ceil(2^7.5)


def test_arm_budget_rejects_negative_level():
    with pytest.raises(InvalidArgumentError):
        arm_budget(-1, 2.0)


# ---------------------------------------------------------------------------
# elimination rule
# ---------------------------------------------------------------------------


def test_eliminate_worked_example():
    survivors, eliminated = eliminate([0.10, 0.20, 0.30], alpha=1.5, edge_length=0.1)
    assert survivors == (0, 1)
    assert eliminated == (2,)


def test_eliminate_keeps_exact_threshold():
    survivors, eliminated = eliminate([0.0, 0.5, 0.5000001, 1.0], 2.0, 0.25)
    assert survivors == (0, 1)
    assert eliminated == (2, 3)


def test_eliminate_argmin_always_survives():
    survivors, eliminated = eliminate([5.0], 0.001, 0.5)
    assert survivors == (0,)
    assert eliminated == ()


def test_eliminate_rejects_non_finite():
    with pytest.raises(InvalidLossError):
        eliminate([0.1, math.nan], 1.0, 0.5)
    with pytest.raises(InvalidLossError):
        eliminate([0.1, math.inf], 1.0, 0.5)
    with pytest.raises(InvalidArgumentError):
        eliminate([], 1.0, 0.5)


# ---------------------------------------------------------------------------
# spend projection
# ---------------------------------------------------------------------------


def test_next_grid_point_worked_example():
    assert next_grid_point(64, 0.5, 0.25, survivors=3, budget_next=16, dim=2) == 256


def test_next_grid_point_stays_exact_for_big_integers():
    got = next_grid_point(0, 0.25, 0.0625, survivors=5, budget_next=65536, dim=8)
    assert got == (1 << 16) * 5 * 65536
    assert got == 21474836480


def test_next_grid_point_validation():
    with pytest.raises(InvalidArgumentError):
        next_grid_point(0, 0.25, 0.25, 1, 1, 1)
    with pytest.raises(InvalidArgumentError):
        next_grid_point(0, 0.25, 0.5, 1, 1, 1)
    with pytest.raises(InvalidArgumentError):
        next_grid_point(0, 0.5, 0.25, 0, 1, 1)
    with pytest.raises(InvalidArgumentError):
        next_grid_point(0, 0.5, 0.25, 1, 0, 1)


# ---------------------------------------------------------------------------
# cleanup round
# ---------------------------------------------------------------------------


def _exact_backend(dim: int):
    inst = certified_instance(toy_instance("mu1", dim, sigma=0.0), "zero")
    return inst, in_process_backend(inst)


def test_cleanup_zero_remaining_keeps_losses():
    inst, backend = _exact_backend(1)
    cands = [
        Candidate(Cube(2, (1,)), (0.3,), 4, 0.3),
        Candidate(Cube(2, (0,)), (0.1,), 4, 0.1),
    ]
    final, best, n_f, leftover = cleanup(cands, 0, backend)
    assert final == tuple(cands)
    assert (best, n_f, leftover) == (1, 0, 0)


def test_cleanup_divides_budget_and_discards_remainder():
    inst, backend = _exact_backend(1)
    cands = [
        Candidate(Cube(2, (0,)), (0.10,), 4, 0.10),
        Candidate(Cube(2, (1,)), (0.30,), 4, 0.30),
        Candidate(Cube(2, (2,)), (0.60,), 4, 0.60),
    ]
    final, best, n_f, leftover = cleanup(cands, 8, backend)
    assert n_f == 2
    assert leftover == 2
    assert all(c.budget == 6 for c in final)
    assert [c.loss for c in final] == [0.10, 0.30, 0.60]
    assert best == 0


def test_cleanup_tie_breaks_toward_smallest_cube_coords():
    inst, backend = _exact_backend(2)
    cands = [
        Candidate(Cube(1, (1, 0)), (0.6, 0.1), 4, 0.25),
        Candidate(Cube(1, (0, 1)), (0.1, 0.6), 4, 0.25),
        Candidate(Cube(1, (0, 0)), (0.2, 0.1), 4, 0.25),
    ]
    final, best, n_f, leftover = cleanup(cands, 0, backend)
    assert best == 2


def test_cleanup_validation():
    inst, backend = _exact_backend(1)
    with pytest.raises(InvalidArgumentError):
        cleanup([], 10, backend)
    with pytest.raises(InvalidArgumentError):
        cleanup([Candidate(Cube(1, (0,)), (0.1,), 1, 0.1)], -1, backend)


# ---------------------------------------------------------------------------
# full runs
# ---------------------------------------------------------------------------


class _RecordingBackend(InProcessBackend):
    def __init__(self, instance):
        super().__init__(instance)
        self.requests: list[EvalRequest] = []

    def evaluate(self, request: EvalRequest) -> float:
        self.requests.append(request)
        return super().evaluate(request)


def test_run_blie_certified_never_drops_optimal_cube():
    inst = certified_instance(toy_instance("mu1", 2, sigma=0.0), "worst_up", seed=3)
    config = BlieConfig(
        alpha=2.0 * inst.lipschitz + 2.0,
        beta=2.0,
        schedule=doubling_schedule(),
        total_budget=2**14,
        seed=7,
    )
    trace = run_blie(config, inst, in_process_backend(inst))
    for batch in trace.batches:
        origin = next(
            i for i, c in enumerate(batch.cubes) if c.coords == (0,) * inst.dim
        )
        assert origin in batch.survivors
    assert any(c.cube.coords == (0, 0) for c in trace.candidates)


def test_run_blie_refines_only_survivors():
    inst = certified_instance(toy_instance("mu2", 2, sigma=0.0), "worst_down", seed=1)
    config = BlieConfig(alpha=5.0, beta=2.0, schedule=doubling_schedule(), total_budget=2**13)
    trace = run_blie(config, inst, in_process_backend(inst))
    for prev, cur in zip(trace.batches, trace.batches[1:]):
        kept = {prev.cubes[i].coords for i in prev.survivors}
        parents = {
            tuple(c >> (cur.level - prev.level) for c in cube.coords)
            for cube in cur.cubes
        }
        assert parents == kept
        assert len(cur.cubes) == len(prev.survivors) * (
            1 << ((cur.level - prev.level) * inst.dim)
        )
    for batch in trace.batches:
        assert batch.budget_per_arm == arm_budget(batch.level, config.beta)
        for cube, arm in zip(batch.cubes, batch.arms):
            assert cube.contains(arm)


def test_run_blie_budget_identity_and_stop_rule():
    inst = certified_instance(toy_instance("mu1", 2, sigma=0.0), "random_sign", seed=4)
    for total in (2**10, 2**12, 3000, 5001):
        config = BlieConfig(
            alpha=4.0, beta=2.0, schedule=doubling_schedule(), total_budget=total, seed=2
        )
        backend = _RecordingBackend(inst)
        trace = run_blie(config, inst, backend)
        assert trace.total_spent <= total
        assert trace.leftover < len(trace.candidates)
        assert trace.total_spent + trace.leftover == total
        assert sum(r.marginal_cost for r in backend.requests) == trace.total_spent
        loop_cost = sum(b.cost for b in trace.batches)
        assert loop_cost + trace.cleanup_budget * len(trace.candidates) == trace.total_spent
        assert trace.batch_count == len(trace.batches) + (
            1 if trace.cleanup_budget > 0 else 0
        )
        last = trace.batches[-1]
        assert last.projected_next is None or last.projected_next >= total
        for batch in trace.batches[:-1]:
            assert batch.projected_next is not None
            assert batch.projected_next < total
        grid = [b.grid_point for b in trace.batches]
        assert grid == sorted(grid)


def test_run_blie_constant_instance_keeps_everything():
    inst = constant_instance(2, value=0.5)
    config = BlieConfig(alpha=1.0, beta=2.0, schedule=doubling_schedule(), total_budget=2**10)
    trace = run_blie(config, inst, in_process_backend(inst))
    for batch in trace.batches:
        assert batch.eliminated == ()
    assert trace.simple_regret == 0.0
    assert trace.best_loss == 0.5


def test_run_blie_budget_too_small():
    inst = toy_instance("mu1", 2, sigma=0.0)
    config = BlieConfig(alpha=4.0, beta=2.0, schedule=doubling_schedule(), total_budget=15)
    with pytest.raises(BudgetTooSmallError) as err:
        run_blie(config, inst, in_process_backend(inst))
    assert err.value.minimum_feasible == 16


def test_run_blie_deterministic_given_seed():
    def one_trace():
        inst = toy_instance("mu1", 2, sigma=0.1, seed=11)
        config = BlieConfig(
            alpha=4.0, beta=2.0, schedule=doubling_schedule(), total_budget=2**12, seed=5
        )
        d = run_blie(config, inst, in_process_backend(inst)).to_dict()
        d.pop("wall_time_ms")
        return d

    assert one_trace() == one_trace()


def test_run_blie_seed_changes_arms():
    inst = toy_instance("mu1", 2, sigma=0.0)
    traces = []
    for seed in (0, 1):
        config = BlieConfig(
            alpha=4.0, beta=2.0, schedule=doubling_schedule(), total_budget=2**10, seed=seed
        )
        traces.append(run_blie(config, inst, in_process_backend(inst)))
    assert traces[0].batches[0].arms != traces[1].batches[0].arms


def test_run_blie_explicit_schedule_exhaustion_goes_to_cleanup():
    inst = certified_instance(toy_instance("mu1", 1, sigma=0.0), "zero")
    config = BlieConfig(
        alpha=100.0,
        beta=2.0,
        schedule=explicit_schedule([0.5, 0.25]),
        total_budget=2**10,
    )
    trace = run_blie(config, inst, in_process_backend(inst))
    assert [b.level for b in trace.batches] == [1, 2]
    assert trace.batches[-1].projected_next is None
    assert trace.cleanup_budget > 0
    # alpha is huge, so all four level-2 cubes reach cleanup
    assert len(trace.candidates) == 4


def test_run_blie_without_instance_needs_dim():
    inst = toy_instance("mu1", 2, sigma=0.0)
    config = BlieConfig(alpha=4.0, beta=2.0, schedule=doubling_schedule(), total_budget=2**10)
    with pytest.raises(InvalidArgumentError):
        run_blie(config, None, in_process_backend(inst))
    anon = BlieConfig(
        alpha=4.0, beta=2.0, schedule=doubling_schedule(), total_budget=2**10, dim=2
    )
    trace = run_blie(anon, None, in_process_backend(inst))
    assert trace.instance is None
    assert trace.simple_regret is None


def test_run_blie_dim_mismatch_rejected():
    inst = toy_instance("mu1", 2, sigma=0.0)
    config = BlieConfig(
        alpha=4.0, beta=2.0, schedule=doubling_schedule(), total_budget=2**10, dim=3
    )
    with pytest.raises(InvalidArgumentError):
        run_blie(config, inst, in_process_backend(inst))


def test_config_validation():
    sched = doubling_schedule()
    with pytest.raises(InvalidArgumentError):
        BlieConfig(alpha=0.0, beta=2.0, schedule=sched, total_budget=100)
    with pytest.raises(InvalidArgumentError):
        BlieConfig(alpha=1.0, beta=-1.0, schedule=sched, total_budget=100)
    with pytest.raises(InvalidArgumentError):
        BlieConfig(alpha=1.0, beta=2.0, schedule=sched, total_budget=0)
    with pytest.raises(InvalidArgumentError):
        BlieConfig(alpha=1.0, beta=2.0, schedule=sched, total_budget=100, dim=0)
