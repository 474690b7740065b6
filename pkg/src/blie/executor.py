"""Batched evaluation dispatch.

A batch is a list of :class:`EvalRequest` objects; :func:`run_batch` runs all
of them to completion and returns one :class:`EvalResult` per request, in
request order. Nothing is observable until the whole batch returns, which is
exactly the feedback model the optimizers in this package assume.

Two backends exist. :class:`InProcessBackend` evaluates against an
:class:`~blie.instances.Instance` directly; results are bit-identical for any
``parallelism`` because instances derive their randomness from the request
content, not the scheduling order. :class:`ExternalEvaluator` dispatches to a
pool of worker subprocesses speaking newline-delimited JSON (one object per
line, UTF-8) over stdin/stdout:

    request:  {"id": 7, "point": [0.5, 0.25], "budget": 32, "prior_budget": 8}
    response: {"id": 7, "loss": 0.418}

``prior_budget`` tells the evaluator how much budget this point has already
received, so it may resume from a checkpoint instead of retraining from
scratch. Any stdout line that is not a well-formed response is a protocol
violation. Worker stderr is inherited from the parent process so evaluator
logs land in the run log.
"""

from __future__ import annotations

import json
import math
import queue
import subprocess
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import (
    BatchFailedError,
    EvalTimeoutError,
    InvalidArgumentError,
    InvalidLossError,
    ProtocolError,
    SpawnError,
)
from .instances import Instance

__all__ = [
    "EvalRequest",
    "EvalResult",
    "ExternalEvaluator",
    "InProcessBackend",
    "external_evaluator",
    "in_process_backend",
    "run_batch",
]

DEFAULT_TIMEOUT_S = 3600.0


@dataclass(frozen=True)
class EvalRequest:
    """One (arm, budget) evaluation order.

    ``cumulative_budget`` is the total number of unit evaluations the point
    should have received once this request completes; ``prior_budget`` is how
    many of those were already granted by earlier batches (0 for a fresh
    arm). The marginal cost of the request is the difference.
    """

    request_id: int
    point: tuple[float, ...]
    cumulative_budget: int
    prior_budget: int = 0

    def __post_init__(self):
        if self.prior_budget < 0:
            raise InvalidArgumentError(
                f"prior_budget must be >= 0, got {self.prior_budget}"
            )
        if self.cumulative_budget <= self.prior_budget:
            raise InvalidArgumentError(
                f"cumulative_budget ({self.cumulative_budget}) must exceed "
                f"prior_budget ({self.prior_budget})"
            )
        if any(not (0.0 <= c <= 1.0) for c in self.point):
            raise InvalidArgumentError(
                f"point coordinates must lie in [0, 1], got {self.point}"
            )

    @property
    def marginal_cost(self) -> int:
        return self.cumulative_budget - self.prior_budget


@dataclass(frozen=True)
class EvalResult:
    """Outcome of one request: a finite loss plus wall time in milliseconds."""

    request_id: int
    loss: float
    wall_time_ms: int


class InProcessBackend:
    """Evaluates requests directly against an instance in this process."""

    def __init__(self, instance: Instance):
        self.instance = instance

    def evaluate(self, request: EvalRequest) -> float:
        return self.instance.loss(
            request.point, request.cumulative_budget, request.prior_budget
        )

    def close(self) -> None:
        pass


class _Worker:
    """One external evaluator process plus a reader thread.

    The reader thread drains stdout into a queue so that waiting for a reply
    can carry a timeout and so that a worker death is observed promptly (the
    reader enqueues a sentinel on EOF).
    """

    def __init__(self, command: list[str], cwd: str | None, index: int):
        self.index = index
        try:
            self.proc = subprocess.Popen(
                command,
                cwd=cwd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=None,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise SpawnError(f"could not start evaluator {command!r}: {exc}") from exc
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(
            target=self._read_loop, name=f"evaluator-reader-{index}", daemon=True
        )
        self._reader.start()

    def _read_loop(self) -> None:
        assert self.proc.stdout is not None
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def ask(self, request: EvalRequest, timeout_s: float) -> float:
        payload = json.dumps(
            {
                "id": request.request_id,
                "point": list(request.point),
                "budget": request.cumulative_budget,
                "prior_budget": request.prior_budget,
            }
        )
        try:
            assert self.proc.stdin is not None
            self.proc.stdin.write(payload + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProtocolError(
                f"evaluator worker {self.index} closed its stdin "
                f"(exit code {self.proc.poll()})"
            ) from exc
        try:
            line = self._lines.get(timeout=timeout_s)
        except queue.Empty:
            raise EvalTimeoutError(
                f"request {request.request_id} exceeded {timeout_s} s on "
                f"worker {self.index}"
            ) from None
        if line is None:
            try:
                exit_code = self.proc.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                exit_code = None
            raise ProtocolError(
                f"evaluator worker {self.index} exited while request "
                f"{request.request_id} was pending (exit code {exit_code})"
            )
        return self._parse_reply(line, request.request_id)

    @staticmethod
    def _parse_reply(line: str, expected_id: int) -> float:
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"evaluator emitted a non-JSON line: {line!r}") from exc
        if not isinstance(reply, dict) or "id" not in reply or "loss" not in reply:
            raise ProtocolError(
                f"evaluator reply must be an object with 'id' and 'loss': {line!r}"
            )
        if reply["id"] != expected_id:
            raise ProtocolError(
                f"evaluator answered request {reply['id']!r} while "
                f"{expected_id} was pending"
            )
        loss = reply["loss"]
        if isinstance(loss, bool) or not isinstance(loss, (int, float)):
            raise InvalidLossError(
                f"request {expected_id} returned a non-numeric loss: {loss!r}"
            )
        loss = float(loss)
        if not math.isfinite(loss):
            raise InvalidLossError(
                f"request {expected_id} returned a non-finite loss: {loss!r}"
            )
        return loss

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                if self.proc.stdin is not None:
                    self.proc.stdin.close()
            except OSError:
                pass
            try:
                self.proc.wait(timeout=5.0)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()


class ExternalEvaluator:
    """A pool of evaluator subprocesses, one per parallel slot.

    Workers are spawned lazily: a batch at parallelism p ensures at least
    ``min(p, len(batch))`` live workers. The pool persists across batches so
    evaluators can keep warm state; calling :meth:`close` (or using the
    handle as a context manager) shuts every worker down.
    """

    def __init__(
        self,
        command: list[str],
        cwd: str | None = None,
        timeout_s: float = DEFAULT_TIMEOUT_S,
    ):
        if not command:
            raise InvalidArgumentError("evaluator command must be non-empty")
        if timeout_s <= 0:
            raise InvalidArgumentError(f"timeout must be positive, got {timeout_s}")
        self.command = list(command)
        self.cwd = cwd
        self.timeout_s = float(timeout_s)
        self._workers: list[_Worker] = []
        self._closed = False

    def ensure_workers(self, count: int) -> list[_Worker]:
        if self._closed:
            raise InvalidArgumentError("evaluator pool is closed")
        while len(self._workers) < count:
            self._workers.append(
                _Worker(self.command, self.cwd, index=len(self._workers))
            )
        return self._workers[:count]

    def close(self) -> None:
        self._closed = True
        for worker in self._workers:
            worker.close()
        self._workers.clear()

    def __enter__(self) -> "ExternalEvaluator":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def in_process_backend(instance: Instance) -> InProcessBackend:
    """Backend that evaluates a synthetic instance in this process."""
    return InProcessBackend(instance)


def external_evaluator(
    command: list[str], cwd: str | None = None, timeout_s: float = DEFAULT_TIMEOUT_S
) -> ExternalEvaluator:
    """Backend handle for an external evaluator process pool."""
    return ExternalEvaluator(command, cwd=cwd, timeout_s=timeout_s)


def _check_requests(requests: list[EvalRequest]) -> None:
    seen: set[int] = set()
    for req in requests:
        if req.request_id in seen:
            raise InvalidArgumentError(f"duplicate request_id {req.request_id}")
        seen.add(req.request_id)


def _finish(request: EvalRequest, loss: float, started: float) -> EvalResult:
    if not isinstance(loss, (int, float)) or isinstance(loss, bool):
        raise InvalidLossError(
            f"request {request.request_id} returned a non-numeric loss: {loss!r}"
        )
    loss = float(loss)
    if not math.isfinite(loss):
        raise InvalidLossError(
            f"request {request.request_id} returned a non-finite loss: {loss!r}"
        )
    elapsed_ms = max(0, int(round((time.perf_counter() - started) * 1000.0)))
    return EvalResult(request.request_id, loss, elapsed_ms)


def _run_in_process(
    requests: list[EvalRequest], backend: InProcessBackend, parallelism: int
) -> list[EvalResult]:
    def one(request: EvalRequest) -> EvalResult:
        started = time.perf_counter()
        return _finish(request, backend.evaluate(request), started)

    if parallelism == 1 or len(requests) == 1:
        return [one(req) for req in requests]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(one, requests))


def _run_external(
    requests: list[EvalRequest], backend: ExternalEvaluator, parallelism: int
) -> list[EvalResult]:
    workers = backend.ensure_workers(min(parallelism, len(requests)))
    results: list[EvalResult | None] = [None] * len(requests)
    errors: list[tuple[int, Exception]] = []
    lock = threading.Lock()

    def drive(worker: _Worker, slot: int) -> None:
        for pos in range(slot, len(requests), len(workers)):
            request = requests[pos]
            started = time.perf_counter()
            try:
                loss = worker.ask(request, backend.timeout_s)
                results[pos] = _finish(request, loss, started)
            except Exception as exc:
                with lock:
                    errors.append((pos, exc))
                return

    threads = [
        threading.Thread(target=drive, args=(worker, slot), daemon=True)
        for slot, worker in enumerate(workers)
    ]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    if errors:
        errors.sort(key=lambda item: item[0])
        pos, cause = errors[0]
        if isinstance(cause, InvalidLossError):
            raise cause
        done = sum(1 for r in results if r is not None)
        raise BatchFailedError(
            f"batch failed at request {requests[pos].request_id} "
            f"({done}/{len(requests)} requests completed): {cause}",
            request_id=requests[pos].request_id,
        ) from cause
    return [result for result in results if result is not None]


def run_batch(
    requests: list[EvalRequest],
    backend: InProcessBackend | ExternalEvaluator,
    parallelism: int = 1,
) -> list[EvalResult]:
    """Run every request to completion; all results or an exception.

    Results come back in request order. Requests may execute concurrently up
    to ``parallelism``; the in-process backend returns the same losses for
    any parallelism level. On failure nothing from the batch is usable: a
    non-finite or non-numeric loss raises :class:`InvalidLossError` naming
    the request, and an external crash, protocol violation, or timeout
    raises :class:`BatchFailedError` whose ``__cause__`` is the specific
    underlying error.
    """
    if parallelism < 1:
        raise InvalidArgumentError(f"parallelism must be >= 1, got {parallelism}")
    _check_requests(requests)
    if not requests:
        return []
    if isinstance(backend, InProcessBackend):
        return _run_in_process(requests, backend, parallelism)
    if isinstance(backend, ExternalEvaluator):
        return _run_external(requests, backend, parallelism)
    raise InvalidArgumentError(f"unknown backend type {type(backend).__name__}")
