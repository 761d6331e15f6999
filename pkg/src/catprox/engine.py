"""Fixed-point iteration of operator chains.

A chain ``[S_1, ..., S_m]`` is applied first-to-last (the composite
``S_m ... S_1``).  Each factor is a metric projection or a resolvent; both
are quasi-nonexpansive with respect to their fixed sets, and when the fixed
sets intersect, the composite's fixed set equals the intersection.  Picard
iteration of the composite is then Fejer monotone with respect to every
common fixed point and its residuals vanish.

All shipped model spaces are proper, so weak (Delta) limits of the iterate
sequence coincide with strong limits; convergence is therefore tested
directly through residual and step tolerances.  The iteration is
deterministic: identical inputs produce bit-identical traces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Union

from .errors import DomainError, SpaceMismatch
from .functions import ConvexFunction, _check_lambda
from .sets import ConvexSet
from .spaces import (GEO_TOL, Point, SpaceDescriptor, distance, point_to_json,
                     space_to_json)


@dataclass(frozen=True)
class Projection:
    """Metric projection onto a convex set."""

    region: ConvexSet

    @property
    def space(self) -> SpaceDescriptor:
        return self.region.space

    def apply(self, x: Point) -> Point:
        return self.region.project(x)

    def residual(self, x: Point) -> float:
        return distance(x, self.apply(x))

    def fix_distance(self, x: Point) -> float:
        """Distance from ``x`` to the factor's fixed set (the set itself)."""
        return distance(x, self.region.project(x))

    def sample_fix(self, rng) -> Point:
        return self.region.sample(rng)

    def __str__(self) -> str:
        return f"projection[{self.region}]"


@dataclass(frozen=True)
class Resolvent:
    """Resolvent of a convex function at a fixed parameter ``lam > 0``.
    Its fixed set is the function's minimizer set."""

    func: ConvexFunction
    lam: float

    def __post_init__(self) -> None:
        _check_lambda(self.lam)

    @property
    def space(self) -> SpaceDescriptor:
        return self.func.space

    def apply(self, x: Point) -> Point:
        return self.func.resolvent(self.lam, x)

    def residual(self, x: Point) -> float:
        return distance(x, self.apply(x))

    def fix_distance(self, x: Point) -> float:
        return self.func.distance_to_argmin(x)

    def sample_fix(self, rng) -> Point:
        return self.func.argmin_sample(rng)

    def __str__(self) -> str:
        return f"resolvent[{self.func}, lam={self.lam}]"


Operator = Union[Projection, Resolvent]


@dataclass(frozen=True)
class OperatorChain:
    """A nonempty tuple of operators over one space, applied first-to-last."""

    space: SpaceDescriptor
    factors: tuple[Operator, ...]

    def __post_init__(self) -> None:
        if not self.factors:
            raise DomainError("an operator chain needs at least one factor")
        for i, f in enumerate(self.factors):
            if f.space != self.space:
                raise SpaceMismatch(
                    f"factor {i} lives in {f.space}, chain in {self.space}")

    def apply(self, x: Point) -> Point:
        for f in self.factors:
            x = f.apply(x)
        return x

    def apply_with_partials(self, x: Point) -> tuple[Point, list[float]]:
        """Apply the chain; also return d(partial, S_k(partial)) per factor."""
        per_factor = []
        for f in self.factors:
            y = f.apply(x)
            per_factor.append(distance(x, y))
            x = y
        return x, per_factor

    def residual(self, x: Point) -> float:
        return distance(x, self.apply(x))


@dataclass(frozen=True)
class IterationConfig:
    max_iter: int = 100_000
    residual_tol: float = 1e-10
    step_tol: float = 1e-10
    log_every: int = 1

    def __post_init__(self) -> None:
        if self.max_iter < 0:
            raise DomainError("max_iter must be nonnegative")
        if not self.residual_tol > 0:
            raise DomainError("residual_tol must be positive")
        if not self.step_tol > 0:
            raise DomainError("step_tol must be positive")
        if self.log_every < 1:
            raise DomainError("log_every must be at least 1")


class IterStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITER_REACHED = "max_iter_reached"


@dataclass
class Trace:
    """Record of one Picard run.

    ``residuals[n]`` is d(x_n, S x_n) for every visited iterate
    ``n = 0..iterations_used`` (so its length is ``iterations_used + 1``);
    the same indexing applies to ``per_factor_residuals``.  ``iterates``
    holds the subsampled orbit per ``log_every``, always including x_0 and
    the final iterate, with ``iterate_indices`` giving their positions.
    """

    space: SpaceDescriptor
    config: IterationConfig
    status: IterStatus
    iterations_used: int
    iterate_indices: list[int]
    iterates: list[Point]
    residuals: list[float]
    per_factor_residuals: list[list[float]]

    @property
    def final(self) -> Point:
        return self.iterates[-1]

    def to_json_dict(self) -> dict:
        return {
            "space": space_to_json(self.space),
            "status": self.status.value,
            "iterations_used": self.iterations_used,
            "config": {
                "max_iter": self.config.max_iter,
                "residual_tol": self.config.residual_tol,
                "step_tol": self.config.step_tol,
                "log_every": self.config.log_every,
            },
            "iterate_indices": list(self.iterate_indices),
            "iterates": [point_to_json(p) for p in self.iterates],
            "residuals": list(self.residuals),
            "per_factor_residuals": [list(r) for r in self.per_factor_residuals],
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv_text(self) -> str:
        """Delimited form: ``iter,coord_0,...,coord_k,residual`` with
        17-significant-digit floats.  Spider rows store (leg, radius) in the
        two coordinate columns."""
        ncoord = self.space.coord_len
        header = "iter," + ",".join(f"coord_{i}" for i in range(ncoord)) + ",residual"
        lines = [header]
        for idx, pt in zip(self.iterate_indices, self.iterates):
            cells = [str(idx)]
            cells += [f"{float(c):.17g}" for c in pt.coords]
            cells.append(f"{self.residuals[idx]:.17g}")
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def picard(chain: OperatorChain, x0: Point, config: IterationConfig) -> Trace:
    """Iterate ``x_{n+1} = S(x_n)`` until both the residual and the step fall
    within tolerance (status CONVERGED) or ``max_iter`` steps were taken
    (status MAX_ITER_REACHED).  A start already inside the common fixed set
    converges at iteration 0."""
    if x0.space != chain.space:
        raise SpaceMismatch(f"x0 lives in {x0.space}, chain in {chain.space}")
    x = x0
    n = 0
    indices = [0]
    iterates = [x0]
    residuals: list[float] = []
    per_factor: list[list[float]] = []
    while True:
        y, pf = chain.apply_with_partials(x)
        r = distance(x, y)
        residuals.append(r)
        per_factor.append(pf)
        if r <= config.residual_tol and r <= config.step_tol:
            status = IterStatus.CONVERGED
            break
        if n == config.max_iter:
            status = IterStatus.MAX_ITER_REACHED
            break
        n += 1
        x = y
        if n % config.log_every == 0:
            indices.append(n)
            iterates.append(x)
    if indices[-1] != n:
        indices.append(n)
        iterates.append(x)
    return Trace(space=chain.space, config=config, status=status,
                 iterations_used=n, iterate_indices=indices,
                 iterates=iterates, residuals=residuals,
                 per_factor_residuals=per_factor)


class FejerResult(NamedTuple):
    ok: bool
    first_violation: int | None  # iterate index preceding the increase
    worst_increase: float


def fejer_check(trace: Trace, q: Point, tol: float = GEO_TOL) -> FejerResult:
    """Verify d(x_n, q) is nonincreasing along the logged iterates.  The
    caller is responsible for ``q`` being a fixed point of the iterated
    chain; use a residual test first."""
    dists = [distance(p, q) for p in trace.iterates]
    worst = 0.0
    first = None
    for k in range(1, len(dists)):
        inc = dists[k] - dists[k - 1]
        if inc > worst:
            worst = inc
        if inc > tol and first is None:
            first = trace.iterate_indices[k - 1]
    return FejerResult(first is None, first, worst)
