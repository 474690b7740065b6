"""Benchmark instances, noise models, and the zooming-dimension oracle.

An :class:`Instance` bundles a limit loss ``mu`` on ``[0, 1]^d`` with a
budgeted evaluation rule ``loss(x, n)``. Three noise regimes are covered:

``certified``
    Deterministic worst-case noise within the envelope ``n**(-1/beta)``,
    so ``|loss(x, n) - mu(x)| <= n**(-1/beta)`` holds exactly.
``gaussian_mean``
    ``loss(x, n)`` behaves like the average of n i.i.d. Gaussians centred at
    ``mu(x)``. Averages are simulated directly (one draw per query) and all
    queries to the same point share a single underlying sample path, so
    deepening the budget refines rather than resamples the observation.
``adversarial``
    A fixed deterministic perturbation designed to defeat a specific search
    strategy (see :func:`uniform_search_adversary`).

The zooming oracle counts, for a given scale r, the standard cubes of edge r
fully contained in the near-optimal region at tolerance ``(8L + 8) * r``, and
fits a power law to those counts across scales.
"""

from __future__ import annotations

import math
import threading
from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ConstructionInfeasibleError,
    FitFailedError,
    InvalidArgumentError,
    ResourceLimitError,
)
from .geometry import dyadic_level

__all__ = [
    "Instance",
    "ZoomingStats",
    "certified_instance",
    "constant_instance",
    "fit_zooming_dimension",
    "instance_from_descriptor",
    "near_optimal_measure",
    "toy_instance",
    "uniform_search_adversary",
    "zooming_number",
]

ADVERSARY_POLICIES = ("worst_up", "worst_down", "random_sign", "zero")


def _stream(seed: int, *parts: int) -> np.random.Generator:
    """A generator keyed by (seed, parts), independent of query order."""
    return np.random.default_rng(np.random.SeedSequence((seed, *parts)))


def _point_words(point: np.ndarray) -> tuple[int, ...]:
    """Encode the exact float64 bits of a point as integers for seeding."""
    raw = np.ascontiguousarray(point, dtype=np.float64).tobytes()
    return tuple(
        int.from_bytes(raw[k : k + 8], "little") for k in range(0, len(raw), 8)
    )


class Instance:
    """Base class: a limit loss plus a budgeted evaluation rule.

    Subclasses must set ``name``, ``dim``, ``lipschitz``, ``beta`` and
    ``noise_mode``, and implement :meth:`mu` and :meth:`loss`. ``optimum``
    is ``(argmin point, minimum value)`` when known, else ``None``. ``dz``
    and ``cz`` record the instance's zooming exponent and constant when they
    are known analytically.
    """

    name: str = "instance"
    dim: int = 1
    lipschitz: float = 1.0
    beta: float = 2.0
    noise_mode: str = "certified"
    optimum: tuple[tuple[float, ...], float] | None = None
    dz: float | None = None
    cz: float | None = None

    def mu(self, point: Sequence[float]) -> float:
        """Limit loss at a point."""
        return float(self.mu_batch(np.asarray(point, dtype=float)[None, :])[0])

    def mu_batch(self, points: np.ndarray) -> np.ndarray:
        """Vectorized limit loss over rows of ``points``."""
        raise NotImplementedError

    def loss(self, point: Sequence[float], budget: int, prior_budget: int = 0) -> float:
        """Observed loss at ``point`` after ``budget`` unit evaluations.

        ``prior_budget`` declares how much of the budget was already spent on
        this point by earlier batches; implementations that track sample
        paths use it only as a consistency hint, the returned value is always
        the observation at the full cumulative ``budget``.
        """
        raise NotImplementedError

    def gap(self, point: Sequence[float]) -> float:
        """Optimality gap ``mu(x) - mu*``. Requires a known optimum."""
        if self.optimum is None:
            raise InvalidArgumentError(f"instance {self.name} has no known optimum")
        return self.mu(point) - self.optimum[1]

    def box_gap_bounds(
        self, lowers: np.ndarray, uppers: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray] | None:
        """Exact (min, max) of the optimality gap over axis-aligned boxes.

        Returns ``None`` when no closed form is available; callers fall back
        to probing. Rows of ``lowers``/``uppers`` are box corners.
        """
        return None

    def descriptor(self) -> dict:
        """A JSON-friendly summary used in traces and result rows."""
        return {"name": self.name, "dim": self.dim}


class _MaxNormProfileInstance(Instance):
    """Losses of the form ``mu(x) = profile(||x||_inf)`` with profile nondecreasing.

    The monotone structure gives exact gap extremes over boxes: the gap is
    smallest at the coordinate-wise closest point to the origin and largest
    at the farthest corner.
    """

    def _profile(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def mu_batch(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self._profile(np.max(pts, axis=1))

    def box_gap_bounds(self, lowers, uppers):
        lo = np.atleast_2d(np.asarray(lowers, dtype=float))
        hi = np.atleast_2d(np.asarray(uppers, dtype=float))
        mu_star = self.optimum[1] if self.optimum is not None else 0.0
        inf = self._profile(np.max(lo, axis=1)) - mu_star
        sup = self._profile(np.max(hi, axis=1)) - mu_star
        return inf, sup


class ToyInstance(_MaxNormProfileInstance):
    """Synthetic minimization target with simulated Gaussian mean feedback.

    Variants
    --------
    ``mu1``: ``mu(x) = ||x||_inf``. Lipschitz constant 1. The near-optimal
    region is a single corner box at every scale, so the zooming exponent
    is 0 with constant ``16**d``.

    ``mu2``: ``mu(x) = ||x||_inf ** 1.5``. Lipschitz constant 1.5 on the
    unit box (the derivative of ``t**1.5`` peaks at t = 1). Flatness near
    the optimum thickens the near-optimal region; the zooming exponent is
    ``d / 3`` with constant ``20**(2 d / 3)``.

    ``loss(x, n)`` is distributed as the mean of n draws from
    ``N(mu(x), sigma^2)``. Queries are memoized per point: a re-query at a
    budget seen before returns the stored value bit for bit, and a query at
    a new budget is drawn conditionally on the stored partial sums, so all
    observations of one point are consistent with a single stream of draws.
    Draws are keyed by (instance seed, point bits, budget bracket), which
    makes results independent of evaluation order across worker threads.
    With ``sigma = 0`` the evaluation is exactly ``mu(x)``.
    """

    def __init__(self, variant: str, dim: int, sigma: float = 0.1, seed: int = 0):
        if variant not in ("mu1", "mu2"):
            raise InvalidArgumentError(f"unknown toy variant {variant!r}")
        if dim < 1:
            raise InvalidArgumentError(f"dim must be >= 1, got {dim}")
        if sigma < 0.0:
            raise InvalidArgumentError(f"sigma must be >= 0, got {sigma}")
        self.variant = variant
        self.dim = dim
        self.sigma = float(sigma)
        self.seed = int(seed)
        self.name = f"toy-{variant}-d{dim}"
        self.lipschitz = 1.0 if variant == "mu1" else 1.5
        self.beta = 2.0
        self.noise_mode = "gaussian_mean"
        self.optimum = (tuple(0.0 for _ in range(dim)), 0.0)
        self.dz = 0.0 if variant == "mu1" else dim / 3.0
        self.cz = 16.0**dim if variant == "mu1" else 20.0 ** (2.0 * dim / 3.0)
        # Per-point sample paths stored as sorted (budget, running sum) pairs.
        self._paths: dict[tuple[int, ...], list[tuple[int, float]]] = {}
        self._lock = threading.Lock()

    def _profile(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return t if self.variant == "mu1" else t**1.5

    def loss(self, point, budget, prior_budget=0):
        if budget < 1:
            raise InvalidArgumentError(f"budget must be >= 1, got {budget}")
        x = np.asarray(point, dtype=float)
        mean = float(self.mu_batch(x[None, :])[0])
        if self.sigma == 0.0:
            return mean
        key = _point_words(x)
        with self._lock:
            path = self._paths.setdefault(key, [])
            budgets = [n for n, _ in path]
            pos = bisect_left(budgets, budget)
            if pos < len(path) and path[pos][0] == budget:
                n, total = path[pos]
                return total / n
            lo = path[pos - 1] if pos > 0 else None
            hi = path[pos] if pos < len(path) else None
            total = self._draw_sum(key, mean, budget, lo, hi)
            path.insert(pos, (budget, total))
            return total / budget

    def _draw_sum(self, key, mean, n, lo, hi):
        """Draw the running sum after n evaluations, given stored neighbours.

        For i.i.d. Gaussian draws the partial-sum process is a Gaussian walk,
        so the sum at an intermediate budget is a bridge between the stored
        sums, and the sum beyond the last stored budget is an independent
        increment. Both cases reduce to a single normal draw.
        """
        s = self.sigma
        lo_n, lo_sum = lo if lo is not None else (0, 0.0)
        rng = _stream(self.seed, *key, n, lo_n, hi[0] if hi is not None else 0)
        z = rng.standard_normal()
        if hi is None:
            gap = n - lo_n
            return lo_sum + gap * mean + math.sqrt(gap) * s * z
        hi_n, hi_sum = hi
        span = hi_n - lo_n
        frac = (n - lo_n) / span
        cond_mean = lo_sum + frac * (hi_sum - lo_sum)
        cond_var = (n - lo_n) * (hi_n - n) / span * s * s
        return cond_mean + math.sqrt(cond_var) * z

    def descriptor(self):
        return {
            "kind": "toy",
            "name": self.name,
            "variant": self.variant,
            "dim": self.dim,
            "sigma": self.sigma,
            "seed": self.seed,
        }


class ConstantInstance(_MaxNormProfileInstance):
    """A flat loss surface; every point is optimal."""

    def __init__(self, dim: int, value: float = 0.5):
        if dim < 1:
            raise InvalidArgumentError(f"dim must be >= 1, got {dim}")
        self.dim = dim
        self.value = float(value)
        self.name = f"constant-d{dim}"
        self.lipschitz = 1.0  # any positive constant is a valid bound
        self.beta = 2.0
        self.noise_mode = "certified"
        self.optimum = (tuple(0.0 for _ in range(dim)), self.value)
        self.dz = float(dim)
        self.cz = 1.0

    def _profile(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.value)

    def loss(self, point, budget, prior_budget=0):
        if budget < 1:
            raise InvalidArgumentError(f"budget must be >= 1, got {budget}")
        return self.value

    def descriptor(self):
        return {"kind": "constant", "name": self.name, "dim": self.dim, "value": self.value}


class CertifiedInstance(Instance):
    """Worst-case deterministic noise pinned to the certified envelope.

    Wraps a base instance with analytic ``mu`` and returns
    ``mu(x) + s * n**(-1/beta)`` where the sign s depends on the policy:
    ``worst_up`` always +1, ``worst_down`` always -1, ``random_sign`` a
    fixed per-point sign derived from the seed, ``zero`` no perturbation.
    """

    def __init__(self, base: Instance, adversary: str, seed: int = 0):
        if adversary not in ADVERSARY_POLICIES:
            raise InvalidArgumentError(
                f"adversary must be one of {ADVERSARY_POLICIES}, got {adversary!r}"
            )
        self.base = base
        self.adversary = adversary
        self.seed = int(seed)
        self.name = f"certified-{adversary}-{base.name}"
        self.dim = base.dim
        self.lipschitz = base.lipschitz
        self.beta = base.beta
        self.noise_mode = "certified"
        self.optimum = base.optimum
        self.dz = base.dz
        self.cz = base.cz

    def mu_batch(self, points):
        return self.base.mu_batch(points)

    def box_gap_bounds(self, lowers, uppers):
        return self.base.box_gap_bounds(lowers, uppers)

    def _sign(self, x: np.ndarray) -> float:
        if self.adversary == "worst_up":
            return 1.0
        if self.adversary == "worst_down":
            return -1.0
        if self.adversary == "zero":
            return 0.0
        draw = _stream(self.seed, *_point_words(x)).integers(0, 2)
        return 1.0 if draw == 1 else -1.0

    def loss(self, point, budget, prior_budget=0):
        if budget < 1:
            raise InvalidArgumentError(f"budget must be >= 1, got {budget}")
        x = np.asarray(point, dtype=float)
        return self.mu(x) + self._sign(x) * budget ** (-1.0 / self.beta)

    def descriptor(self):
        return {
            "kind": "certified",
            "name": self.name,
            "adversary": self.adversary,
            "seed": self.seed,
            "base": self.base.descriptor(),
        }


class UniformSearchAdversaryInstance(_MaxNormProfileInstance):
    """Deterministic instance that defeats one-shot uniform grid search.

    The limit loss is ``mu(x) = 1 + ||x||_inf`` (Lipschitz constant 1,
    optimum value 1 at the origin). Behaviour depends on the grid edge r the
    searcher will use, relative to ``eps = T**(-1/(d + beta))``:

    * ``r >= eps`` (coarse grid): evaluations return ``mu`` exactly. The
      best sampled arm then sits uniformly inside the best grid cell, whose
      expected gap is ``d/(d+1) * r >= eps / 2``.
    * ``r < eps`` (fine grid): an inner shell of cells around the optimum is
      inflated by ``+n**(-1/beta)`` and everything else deflated by the same
      amount. The shell boundary ``b = k0 * r`` is the smallest grid point
      with ``b >= eps / 2`` (and the construction verifies ``b <= eps``), so
      any arm that looks best under the fine grid's per-cell budget lies
      outside the shell and carries gap at least ``eps / 2``.

    Both regimes keep ``|loss - mu| <= n**(-1/beta)``, so certified-noise
    optimizers remain within their guarantees on this instance.
    """

    def __init__(self, dim: int, beta: float, total_budget: int, r: float):
        if dim < 1:
            raise InvalidArgumentError(f"dim must be >= 1, got {dim}")
        if beta <= 0.0:
            raise InvalidArgumentError(f"beta must be positive, got {beta}")
        if total_budget < 2:
            raise InvalidArgumentError(
                f"total budget must be >= 2, got {total_budget}"
            )
        level = dyadic_level(r)
        if (1 << (level * dim)) > total_budget:
            raise InvalidArgumentError(
                f"grid of {(1 << (level * dim))} cells cannot be covered by "
                f"budget {total_budget}"
            )
        self.dim = dim
        self.beta = float(beta)
        self.total_budget = int(total_budget)
        self.r_grid = 2.0 ** (-level)
        self.level = level
        self.lipschitz = 1.0
        self.noise_mode = "adversarial"
        self.optimum = (tuple(0.0 for _ in range(dim)), 1.0)
        self.dz = 0.0
        self.cz = 16.0**dim
        self.epsilon_t = float(total_budget) ** (-1.0 / (dim + beta))

        # Regime test in exact exponent arithmetic: r >= T**(-1/(d+beta))
        # iff level * (d + beta) <= log2(T). The float comparison is safe
        # because both sides are exact for power-of-two budgets and the
        # boundary case belongs to the coarse regime.
        if level * (dim + beta) <= math.log2(total_budget):
            self.regime = "coarse"
            self.k0 = None
            self.boundary = None
        else:
            self.regime = "fine"
            k0 = math.ceil(self.epsilon_t / (2.0 * self.r_grid) - 1e-12)
            k0 = max(k0, 1)
            if k0 * self.r_grid > self.epsilon_t * (1.0 + 1e-12):
                raise ConstructionInfeasibleError(
                    "no grid point falls inside the target window "
                    f"[eps/2, eps] = [{self.epsilon_t / 2}, {self.epsilon_t}] "
                    f"for grid edge {self.r_grid}"
                )
            self.k0 = int(k0)
            self.boundary = self.k0 * self.r_grid
        self.name = f"uniform-adversary-d{dim}-T{total_budget}-r2e-{level}"

    def _profile(self, t):
        return 1.0 + np.asarray(t, dtype=float)

    def loss(self, point, budget, prior_budget=0):
        if budget < 1:
            raise InvalidArgumentError(f"budget must be >= 1, got {budget}")
        x = np.asarray(point, dtype=float)
        base = self.mu(x)
        if self.regime == "coarse":
            return base
        bump = budget ** (-1.0 / self.beta)
        if float(np.max(x)) < self.boundary:
            return base + bump
        return base - bump

    def descriptor(self):
        return {
            "kind": "uniform_adversary",
            "name": self.name,
            "dim": self.dim,
            "beta": self.beta,
            "total_budget": self.total_budget,
            "r": self.r_grid,
            "regime": self.regime,
            "k0": self.k0,
        }


def toy_instance(variant: str, dim: int, sigma: float = 0.1, seed: int = 0) -> ToyInstance:
    """Build a synthetic Gaussian-feedback instance (variants mu1, mu2)."""
    return ToyInstance(variant, dim, sigma=sigma, seed=seed)


def constant_instance(dim: int, value: float = 0.5) -> ConstantInstance:
    """Build a flat instance, useful for no-elimination sanity checks."""
    return ConstantInstance(dim, value=value)


def certified_instance(base: Instance, adversary: str, seed: int = 0) -> CertifiedInstance:
    """Wrap ``base`` with deterministic envelope noise (see class docs)."""
    return CertifiedInstance(base, adversary, seed=seed)


def uniform_search_adversary(
    dim: int, beta: float, total_budget: int, r: float
) -> UniformSearchAdversaryInstance:
    """Build the instance that forces uniform grid search to a large gap."""
    return UniformSearchAdversaryInstance(dim, beta, total_budget, r)


def instance_from_descriptor(desc: dict, default_seed: int = 0) -> Instance:
    """Rebuild an instance from a descriptor dictionary (CLI configs, traces)."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise InvalidArgumentError(f"instance descriptor needs a 'kind' field: {desc!r}")
    kind = desc["kind"]
    seed = int(desc.get("seed", default_seed))
    if kind == "toy":
        return toy_instance(
            desc.get("variant", "mu1"),
            int(desc.get("dim", desc.get("d", 1))),
            sigma=float(desc.get("sigma", 0.1)),
            seed=seed,
        )
    if kind == "constant":
        return constant_instance(
            int(desc.get("dim", desc.get("d", 1))), value=float(desc.get("value", 0.5))
        )
    if kind == "certified":
        base = instance_from_descriptor(desc["base"], default_seed=seed)
        return certified_instance(base, desc.get("adversary", "worst_up"), seed=seed)
    if kind == "uniform_adversary":
        return uniform_search_adversary(
            int(desc.get("dim", desc.get("d", 1))),
            float(desc.get("beta", 2.0)),
            int(desc["total_budget"]),
            float(desc["r"]),
        )
    raise InvalidArgumentError(f"unknown instance kind {kind!r}")


# ---------------------------------------------------------------------------
# Zooming-dimension oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZoomingStats:
    """Scale-by-scale near-optimal cube counts plus a fitted power law.

    ``counts[i]`` is the number of standard cubes of edge ``edge_lengths[i]``
    whose closure lies inside the near-optimal region at tolerance
    ``(8L + 8) * r``. ``fitted_dz`` is the least-squares exponent of
    ``counts ~ cz * r**(-dz)`` clamped to ``[0, dim]`` and ``fitted_cz`` the
    matching constant. ``exact`` records whether the counts used closed-form
    gap extremes (True) or corner probing (False, counts are then upper
    estimates).
    """

    dim: int
    edge_lengths: tuple[float, ...]
    counts: tuple[int, ...]
    fitted_dz: float
    fitted_cz: float
    exact: bool

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "edge_lengths": list(self.edge_lengths),
            "counts": list(self.counts),
            "fitted_dz": self.fitted_dz,
            "fitted_cz": self.fitted_cz,
            "exact": self.exact,
        }


_ZOOM_CHUNK = 1 << 18


def _box_gap_sup(
    instance: Instance, lowers: np.ndarray, uppers: np.ndarray
) -> tuple[np.ndarray, bool]:
    """Per-box gap suprema, analytic when available, probed otherwise."""
    bounds = instance.box_gap_bounds(lowers, uppers)
    if bounds is not None:
        return bounds[1], True
    if instance.optimum is None:
        raise InvalidArgumentError(
            f"instance {instance.name} has no known optimum; cannot measure gaps"
        )
    mu_star = instance.optimum[1]
    dim = lowers.shape[1]
    best = np.full(lowers.shape[0], -np.inf)
    # Probe every corner plus the centre. For monotone coordinate structure
    # this is exact; in general it is a lower bound on the supremum, making
    # the resulting count an upper estimate of the true cube count.
    for mask in range(1 << dim):
        pick = np.array([(mask >> j) & 1 for j in range(dim)], dtype=bool)
        corner = np.where(pick, uppers, lowers)
        best = np.maximum(best, instance.mu_batch(corner) - mu_star)
    centre = 0.5 * (lowers + uppers)
    best = np.maximum(best, instance.mu_batch(centre) - mu_star)
    return best, False


def zooming_number(
    instance: Instance,
    r: float,
    threshold: float | None = None,
    max_cubes: int = 1 << 26,
) -> int:
    """Count standard cubes of edge r inside the near-optimal region.

    Parameters
    ----------
    instance : Instance
        Must expose an analytic limit loss and a known optimum.
    r : float
        Dyadic edge length.
    threshold : float, optional
        Gap tolerance defining the region; defaults to ``(8L + 8) * r``.
    max_cubes : int
        Enumeration guard; levels whose cube population exceeds this raise
        :class:`ResourceLimitError`.
    """
    level = dyadic_level(r)
    side = 1 << level
    total = side**instance.dim
    if total > max_cubes:
        raise ResourceLimitError(
            f"level {level} in dimension {instance.dim} has {total} cubes, "
            f"exceeding the enumeration guard of {max_cubes}"
        )
    if threshold is None:
        threshold = (8.0 * instance.lipschitz + 8.0) * r
    shape = (side,) * instance.dim
    count = 0
    for start in range(0, total, _ZOOM_CHUNK):
        ids = np.arange(start, min(start + _ZOOM_CHUNK, total))
        coords = np.stack(np.unravel_index(ids, shape), axis=1).astype(float)
        lowers = coords * r
        uppers = (coords + 1.0) * r
        sup, _ = _box_gap_sup(instance, lowers, uppers)
        count += int(np.count_nonzero(sup <= threshold))
    return count


def fit_zooming_dimension(instance: Instance, r_values: Sequence[float]) -> ZoomingStats:
    """Count near-optimal cubes across scales and fit ``N_r ~ cz * r**-dz``.

    The fit runs on base-2 logs: slope against ``-log2(r)`` gives the
    exponent (clamped to ``[0, dim]``), and the intercept re-estimated after
    clamping gives the constant. All counts must be positive; a degenerate
    data set raises :class:`FitFailedError`.
    """
    if len(set(float(r) for r in r_values)) < 3:
        raise InvalidArgumentError(
            f"need at least 3 distinct scales to fit, got {list(r_values)}"
        )
    probe = instance.box_gap_bounds(
        np.zeros((1, instance.dim)), np.ones((1, instance.dim))
    )
    exact = probe is not None
    counts = [zooming_number(instance, r) for r in r_values]
    if all(c == 0 for c in counts):
        raise FitFailedError(
            "every scale produced zero near-optimal cubes; nothing to fit"
        )
    if any(c == 0 for c in counts):
        raise FitFailedError(
            f"zero counts at some scales ({counts}); choose finer thresholds"
        )
    t = np.array([-math.log2(r) for r in r_values])
    y = np.log2(np.array(counts, dtype=float))
    tc = t - t.mean()
    denom = float(np.dot(tc, tc))
    slope = float(np.dot(tc, y - y.mean()) / denom) if denom > 0 else 0.0
    slope = min(max(slope, 0.0), float(instance.dim))
    intercept = float(np.mean(y - slope * t))
    return ZoomingStats(
        dim=instance.dim,
        edge_lengths=tuple(float(r) for r in r_values),
        counts=tuple(counts),
        fitted_dz=slope,
        fitted_cz=2.0**intercept,
        exact=exact,
    )


def near_optimal_measure(
    instance: Instance, epsilon: float, num_samples: int = 1_000_000, seed: int = 0
) -> tuple[float, float]:
    """Monte Carlo estimate of the volume of ``{x : gap(x) < epsilon}``.

    Returns the estimated fraction and its binomial standard error.
    """
    if epsilon < 0:
        raise InvalidArgumentError(f"epsilon must be >= 0, got {epsilon}")
    if instance.optimum is None:
        raise InvalidArgumentError(
            f"instance {instance.name} has no known optimum; cannot measure gaps"
        )
    rng = _stream(seed)
    hits = 0
    remaining = num_samples
    mu_star = instance.optimum[1]
    while remaining > 0:
        block = min(remaining, 1 << 20)
        x = rng.random((block, instance.dim))
        gaps = instance.mu_batch(x) - mu_star
        hits += int(np.count_nonzero(gaps < epsilon))
        remaining -= block
    frac = hits / num_samples
    se = math.sqrt(frac * (1.0 - frac) / num_samples)
    return frac, se
