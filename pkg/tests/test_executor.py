from __future__ import annotations

import os
import sys

import numpy as np
import pytest

from blie.errors import (
    BatchFailedError,
    EvalTimeoutError,
    InvalidArgumentError,
    InvalidLossError,
    ProtocolError,
    SpawnError,
)
from blie.executor import (
    EvalRequest,
    external_evaluator,
    in_process_backend,
    run_batch,
)
from blie.instances import toy_instance

STUB = os.path.join(os.path.dirname(__file__), "stub_evaluator.py")


def _stub_command(mode: str = "norm") -> list[str]:
    return [sys.executable, STUB, mode]


def _requests(count: int, dim: int = 2, seed: int = 0) -> list[EvalRequest]:
    rng = np.random.default_rng(seed)
    return [
        EvalRequest(i, tuple(rng.random(dim)), 8, 0) for i in range(count)
    ]


# ---------------------------------------------------------------------------
# request plumbing
# ---------------------------------------------------------------------------


def test_request_validation():
    EvalRequest(0, (0.5, 0.0), 4, 0)
    with pytest.raises(InvalidArgumentError):
        EvalRequest(0, (0.5,), 4, 4)
    with pytest.raises(InvalidArgumentError):
        EvalRequest(0, (0.5,), 4, -1)
    with pytest.raises(InvalidArgumentError):
        EvalRequest(0, (1.5,), 4, 0)
    with pytest.raises(InvalidArgumentError):
        EvalRequest(0, (-0.1,), 4, 0)


def test_marginal_cost():
    assert EvalRequest(0, (0.5,), 12, 4).marginal_cost == 8
    assert EvalRequest(0, (0.5,), 12, 0).marginal_cost == 12


def test_empty_batch_returns_empty():
    backend = in_process_backend(toy_instance("mu1", 1))
    assert run_batch([], backend) == []


def test_duplicate_request_ids_rejected():
    backend = in_process_backend(toy_instance("mu1", 1))
    reqs = [EvalRequest(7, (0.5,), 4, 0), EvalRequest(7, (0.25,), 4, 0)]
    with pytest.raises(InvalidArgumentError):
        run_batch(reqs, backend)


def test_parallelism_must_be_positive():
    backend = in_process_backend(toy_instance("mu1", 1))
    with pytest.raises(InvalidArgumentError):
        run_batch(_requests(2, dim=1), backend, parallelism=0)


# ---------------------------------------------------------------------------
# in-process backend
# ---------------------------------------------------------------------------


def test_in_process_results_in_request_order():
    inst = toy_instance("mu1", 2, sigma=0.0)
    results = run_batch(_requests(16), in_process_backend(inst))
    assert [r.request_id for r in results] == list(range(16))
    assert all(r.wall_time_ms >= 0 for r in results)


def test_in_process_parallelism_does_not_change_losses():
    reqs = _requests(32, dim=2, seed=3)
    losses = []
    for parallelism in (1, 8):
        inst = toy_instance("mu1", 2, sigma=0.1, seed=42)
        results = run_batch(reqs, in_process_backend(inst), parallelism)
        losses.append([r.loss for r in results])
    assert losses[0] == losses[1]


def test_in_process_non_finite_loss_raises():
    class _Broken:
        name = "broken"
        dim = 1

        def loss(self, point, budget, prior_budget=0):
            return float("nan")

    backend = in_process_backend(_Broken())
    with pytest.raises(InvalidLossError):
        run_batch(_requests(1, dim=1), backend)


# ---------------------------------------------------------------------------
# external evaluator protocol
# ---------------------------------------------------------------------------


def test_external_round_trip_matches_in_process_bitwise():
    reqs = _requests(3, dim=3, seed=9)
    inst = toy_instance("mu1", 3, sigma=0.0)
    local = run_batch(reqs, in_process_backend(inst))
    with external_evaluator(_stub_command("norm")) as backend:
        remote = run_batch(reqs, backend)
    assert [r.loss for r in remote] == [r.loss for r in local]
    assert [r.request_id for r in remote] == [0, 1, 2]


def test_external_parallel_pool_keeps_order():
    reqs = _requests(10, dim=2, seed=4)
    with external_evaluator(_stub_command("norm")) as backend:
        results = run_batch(reqs, backend, parallelism=3)
    expected = [max(abs(c) for c in r.point) for r in reqs]
    assert [r.loss for r in results] == expected
    assert [r.request_id for r in results] == list(range(10))


def test_external_passes_prior_budget():
    reqs = [
        EvalRequest(0, (0.5, 0.5), 12, 4),
        EvalRequest(1, (0.25, 0.125), 20, 0),
    ]
    with external_evaluator(_stub_command("prior")) as backend:
        results = run_batch(reqs, backend)
    assert results[0].loss == 0.5 + 4 / 1000.0
    assert results[1].loss == 0.25


def test_external_pool_survives_across_batches():
    with external_evaluator(_stub_command("norm")) as backend:
        first = run_batch(_requests(4, dim=1, seed=1), backend, parallelism=2)
        second = run_batch(_requests(4, dim=1, seed=2), backend, parallelism=2)
    assert len(first) == len(second) == 4


def test_external_nan_loss_raises_invalid_loss():
    with external_evaluator(_stub_command("nan")) as backend:
        with pytest.raises(InvalidLossError):
            run_batch(_requests(2, dim=1), backend)


def test_external_inf_loss_raises_invalid_loss():
    with external_evaluator(_stub_command("inf")) as backend:
        with pytest.raises(InvalidLossError):
            run_batch(_requests(2, dim=1), backend)


def test_external_malformed_reply_is_protocol_error():
    with external_evaluator(_stub_command("malformed")) as backend:
        with pytest.raises(BatchFailedError) as err:
            run_batch(_requests(2, dim=1), backend)
    assert isinstance(err.value.__cause__, ProtocolError)
    assert err.value.request_id == 0


def test_external_mismatched_id_is_protocol_error():
    with external_evaluator(_stub_command("mismatch")) as backend:
        with pytest.raises(BatchFailedError) as err:
            run_batch(_requests(2, dim=1), backend)
    assert isinstance(err.value.__cause__, ProtocolError)


def test_external_crash_is_reported_with_exit_code():
    with external_evaluator(_stub_command("crash")) as backend:
        with pytest.raises(BatchFailedError) as err:
            run_batch(_requests(2, dim=1), backend)
    cause = err.value.__cause__
    assert isinstance(cause, ProtocolError)
    assert "exit code 3" in str(cause)


def test_external_timeout():
    backend = external_evaluator(_stub_command("sleep"), timeout_s=0.3)
    try:
        with pytest.raises(BatchFailedError) as err:
            run_batch(_requests(1, dim=1), backend)
        assert isinstance(err.value.__cause__, EvalTimeoutError)
    finally:
        for worker in backend.ensure_workers(0):
            worker.proc.kill()
        backend.close()


def test_external_spawn_failure():
    backend = external_evaluator(["/nonexistent-evaluator-binary"])
    with pytest.raises(SpawnError):
        run_batch(_requests(1, dim=1), backend)
    backend.close()


def test_external_chatty_stderr_does_not_disturb_protocol():
    reqs = _requests(3, dim=2, seed=6)
    with external_evaluator(_stub_command("chatty")) as backend:
        results = run_batch(reqs, backend)
    expected = [max(abs(c) for c in r.point) for r in reqs]
    assert [r.loss for r in results] == expected


def test_external_close_shuts_workers_down():
    backend = external_evaluator(_stub_command("norm"))
    run_batch(_requests(2, dim=1), backend, parallelism=2)
    workers = list(backend._workers)
    backend.close()
    assert all(w.proc.poll() is not None for w in workers)
    with pytest.raises(InvalidArgumentError):
        backend.ensure_workers(1)


def test_external_evaluator_validation():
    with pytest.raises(InvalidArgumentError):
        external_evaluator([])
    with pytest.raises(InvalidArgumentError):
        external_evaluator(_stub_command(), timeout_s=0.0)
