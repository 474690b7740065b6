"""Exception types shared across the package.

Every failure mode that callers may want to branch on gets its own class.
All of them derive from :class:`BlieError` so ``except BlieError`` catches
anything raised deliberately by this package.
"""

from __future__ import annotations


class BlieError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(BlieError, ValueError):
    """An argument violates a documented precondition."""


class BudgetTooSmallError(BlieError):
    """The evaluation budget cannot cover even the cheapest feasible plan.

    ``minimum_feasible`` carries the smallest total budget that would have
    been accepted, when that number is well defined.
    """

    def __init__(self, message: str, minimum_feasible: int | None = None):
        super().__init__(message)
        self.minimum_feasible = minimum_feasible


class InvalidLossError(BlieError):
    """An evaluation returned NaN, an infinity, or a non-numeric loss."""


class ConstructionInfeasibleError(BlieError):
    """An instance construction has no valid configuration for the inputs."""


class ResourceLimitError(BlieError):
    """A computation would exceed an explicit enumeration or memory guard."""


class FitFailedError(BlieError):
    """A regression over scale data is degenerate (for example, all counts zero)."""


class ProtocolError(BlieError):
    """An external evaluator violated the line-delimited JSON protocol."""


class SpawnError(BlieError):
    """An external evaluator process could not be started."""


class EvalTimeoutError(BlieError):
    """A single evaluation exceeded its wall-clock allowance."""


class BatchFailedError(BlieError):
    """A batch of evaluations aborted; no result from the batch is usable.

    ``request_id`` identifies the first failing request in submission order
    and ``__cause__`` holds the underlying error.
    """

    def __init__(self, message: str, request_id: int | None = None):
        super().__init__(message)
        self.request_id = request_id


class ConfigError(BlieError):
    """An experiment configuration failed validation."""
