"""Dyadic cubes over the unit box and edge-length schedules.

The search domain is ``[0, 1]^d`` under the sup norm. A *standard cube* at
level ``i`` has edge ``2**-i`` and integer corner coordinates; the cubes of a
fixed level tile the domain exactly. Cubes are half open (closed at the lower
face, open at the upper face) except that faces touching the domain boundary
at 1.0 are closed, so every point of the domain belongs to exactly one cube
per level.

Edge-length schedules drive the refinement loop of the optimizer. Two
built-in schedules are provided: plain halving (``doubling_schedule``) and an
accelerated sequence (``ace_schedule``) whose terms are derived from a
geometrically decaying sum of exponents and which reaches fine resolutions in
O(log log T) distinct terms. Arbitrary explicit sequences are also accepted.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "Cube",
    "EdgeLengthSchedule",
    "ace_schedule",
    "doubling_schedule",
    "dyadic_level",
    "explicit_schedule",
    "level_cubes",
    "locate",
    "partition",
    "sample_point",
]


def dyadic_level(edge_length: float) -> int:
    """Return ``i`` such that ``edge_length == 2**-i``.

    Parameters
    ----------
    edge_length : float
        A dyadic edge length in ``(0, 1]``.

    Returns
    -------
    int
        The level (non-negative integer exponent).

    Raises
    ------
    InvalidArgumentError
        If ``edge_length`` is not an exact non-positive power of two.
    """
    if not (0.0 < edge_length <= 1.0):
        raise InvalidArgumentError(
            f"edge length must lie in (0, 1], got {edge_length!r}"
        )
    level = int(round(-math.log2(edge_length)))
    if 2.0 ** (-level) != edge_length:
        raise InvalidArgumentError(
            f"edge length must be a power of two, got {edge_length!r}"
        )
    return level


@dataclass(frozen=True)
class Cube:
    """A standard dyadic cube ``prod_j [c_j * 2**-i, (c_j + 1) * 2**-i)``.

    Attributes
    ----------
    level : int
        Refinement depth ``i >= 0``; the edge length is ``2**-i``.
    coords : tuple of int
        Integer corner coordinates, each in ``[0, 2**i - 1]``. The tuple
        length is the dimension.
    """

    level: int
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.level < 0:
            raise InvalidArgumentError(f"level must be >= 0, got {self.level}")
        if len(self.coords) == 0:
            raise InvalidArgumentError("coords must be non-empty")
        top = 1 << self.level
        for c in self.coords:
            if not (0 <= c < top):
                raise InvalidArgumentError(
                    f"coordinate {c} out of range [0, {top - 1}] at level {self.level}"
                )

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def edge(self) -> float:
        return 2.0 ** (-self.level)

    def lower(self) -> np.ndarray:
        """Lower corner as a float vector."""
        return np.asarray(self.coords, dtype=float) * self.edge

    def upper(self) -> np.ndarray:
        """Upper corner as a float vector."""
        return (np.asarray(self.coords, dtype=float) + 1.0) * self.edge

    def contains(self, point: Sequence[float]) -> bool:
        """Half-open membership with closed top faces at the domain boundary."""
        x = np.asarray(point, dtype=float)
        if x.shape != (self.dim,):
            raise InvalidArgumentError(
                f"point has shape {x.shape}, expected ({self.dim},)"
            )
        top = (1 << self.level) - 1
        lo = self.lower()
        hi = self.upper()
        for j in range(self.dim):
            if not (lo[j] <= x[j]):
                return False
            if x[j] < hi[j]:
                continue
            # Upper face is included only on the domain boundary.
            if self.coords[j] == top and x[j] == hi[j]:
                continue
            return False
        return True


def level_cubes(dim: int, level: int) -> Iterator[Cube]:
    """Yield every standard cube of a level in lexicographic coordinate order."""
    if dim < 1:
        raise InvalidArgumentError(f"dim must be >= 1, got {dim}")
    side = 1 << level
    for coords in itertools.product(range(side), repeat=dim):
        yield Cube(level, coords)


def locate(point: Sequence[float], level: int) -> Cube:
    """Return the unique cube of ``level`` containing ``point``."""
    x = np.asarray(point, dtype=float)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise InvalidArgumentError(f"point {x.tolist()} outside [0, 1]^d")
    side = 1 << level
    coords = np.minimum((x * side).astype(int), side - 1)
    return Cube(level, tuple(int(c) for c in coords))


def partition(cube: Cube, target_level: int) -> list[Cube]:
    """Split a cube into its descendants at a finer level.

    Parameters
    ----------
    cube : Cube
        Parent cube.
    target_level : int
        Level of the children; must be strictly greater than ``cube.level``.

    Returns
    -------
    list of Cube
        The ``2**(d * (target_level - cube.level))`` children in
        lexicographic coordinate order. Their closures cover the parent and
        their interiors are disjoint.
    """
    if target_level <= cube.level:
        raise InvalidArgumentError(
            f"target level {target_level} must exceed cube level {cube.level}"
        )
    factor = 1 << (target_level - cube.level)
    base = [c * factor for c in cube.coords]
    children = []
    for offsets in itertools.product(range(factor), repeat=cube.dim):
        coords = tuple(b + o for b, o in zip(base, offsets))
        children.append(Cube(target_level, coords))
    return children


def sample_point(cube: Cube, rng: np.random.Generator) -> np.ndarray:
    """Draw one point uniformly from a cube.

    The draw consumes exactly one ``rng.random(dim)`` call, so two calls with
    identically seeded generators return identical points.
    """
    return cube.lower() + rng.random(cube.dim) * cube.edge


# ---------------------------------------------------------------------------
# Edge-length schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeLengthSchedule:
    """An immutable, re-iterable sequence of strictly decreasing dyadic edges.

    ``kind`` is one of ``"doubling"`` (infinite, ``2**-m`` at position m),
    ``"ace"`` or ``"explicit"`` (both finite, with precomputed levels).
    Iterating the schedule yields edge lengths as floats; ``levels()`` yields
    the integer exponents. Every iteration restarts from the first term.
    """

    kind: str
    _levels: tuple[int, ...] | None = None
    params: dict = field(default_factory=dict)

    def levels(self) -> Iterator[int]:
        if self.kind == "doubling":
            return itertools.count(1)
        assert self._levels is not None
        return iter(self._levels)

    def edge_lengths(self) -> Iterator[float]:
        return (2.0 ** (-i) for i in self.levels())

    def __iter__(self) -> Iterator[float]:
        return self.edge_lengths()

    @property
    def finite(self) -> bool:
        return self.kind != "doubling"

    def describe(self) -> dict:
        out = {"kind": self.kind, **self.params}
        if self._levels is not None:
            out["levels"] = list(self._levels)
        return out


def doubling_schedule() -> EdgeLengthSchedule:
    """The halving schedule ``1/2, 1/4, 1/8, ...`` (lazy, unbounded)."""
    return EdgeLengthSchedule("doubling")


def ace_schedule(dim: int, dz: float, beta: float, total_budget: int) -> EdgeLengthSchedule:
    """Accelerated edge-length sequence for a planned budget.

    The sequence is built from partial sums ``s_k`` of a geometric series:
    ``c_1 = (dz + beta - 1) / ((dz + beta) * (dim + beta)) * log2(T)`` with
    ratio ``eta = (dim + 1 - dz) / (dim + beta)``. Each ``k`` contributes the
    pair of candidate edges ``2**-floor(s_k)`` and ``2**-ceil(s_k)``, where an
    odd-position entry never increases the resolution already reached.
    Entries equal to their predecessor are dropped, so the emitted sequence
    is strictly decreasing and each term is at most half the previous one.

    The partial sums converge to ``log2(T) / (dz + beta)``, hence the emitted
    sequence is finite and its last term is within a factor 2 of
    ``T**(-1/(dz + beta))``. The number of distinct terms grows like
    ``log log T`` because the summands decay geometrically.

    Parameters
    ----------
    dim : int
        Dimension, at least 1.
    dz : float
        Planning exponent in ``[0, dim]`` describing how fast near-optimal
        regions thin out (0 means a single basin at every scale).
    beta : float
        Noise-decay exponent; evaluations at budget n carry uncertainty
        ``n**(-1/beta)``. Requires ``dz + beta > 1``.
    total_budget : int
        Planned total number of unit evaluations, at least 2.

    Returns
    -------
    EdgeLengthSchedule
        Finite schedule of strictly decreasing dyadic edge lengths.
    """
    if dim < 1:
        raise InvalidArgumentError(f"dim must be >= 1, got {dim}")
    if not (0.0 <= dz <= dim):
        raise InvalidArgumentError(f"dz must lie in [0, dim], got {dz}")
    if beta <= 0.0:
        raise InvalidArgumentError(f"beta must be positive, got {beta}")
    if dz + beta <= 1.0:
        raise InvalidArgumentError(
            f"dz + beta must exceed 1 for the sequence to converge, got {dz + beta}"
        )
    if total_budget < 2:
        raise InvalidArgumentError(f"total budget must be >= 2, got {total_budget}")

    c = (dz + beta - 1.0) / ((dz + beta) * (dim + beta)) * math.log2(total_budget)
    eta = (dim + 1.0 - dz) / (dim + beta)
    levels: list[int] = []
    prev = 0  # exponent of the virtual 0-th term, edge length 1
    s = 0.0
    for _ in range(1_000_000):
        s += c
        lo = max(prev, math.floor(s))
        if lo != prev:
            levels.append(lo)
            prev = lo
        hi = max(prev, math.ceil(s))
        if hi != prev:
            levels.append(hi)
            prev = hi
        c *= eta
        if s + c == s:
            # Remaining increments are below float resolution; the integer
            # parts of future partial sums can no longer change.
            break
    return EdgeLengthSchedule(
        "ace",
        tuple(levels),
        params={"dim": dim, "dz": dz, "beta": beta, "total_budget": total_budget},
    )


def explicit_schedule(edge_lengths: Iterable[float]) -> EdgeLengthSchedule:
    """Wrap a caller-supplied sequence of dyadic edges.

    The sequence must be non-empty and strictly decreasing; every entry must
    be an exact power of two in ``(0, 1]``.
    """
    levels = tuple(dyadic_level(r) for r in edge_lengths)
    if not levels:
        raise InvalidArgumentError("explicit schedule must be non-empty")
    for a, b in zip(levels, levels[1:]):
        if b <= a:
            raise InvalidArgumentError(
                "explicit schedule must be strictly decreasing, got "
                f"2^-{a} followed by 2^-{b}"
            )
    return EdgeLengthSchedule("explicit", levels)
