"""Model-space geometry: distances, geodesics, log/exp maps.

Three Hadamard (complete CAT(0)) model spaces are built in:

* ``euclidean(n)``    flat R^n; coordinates are length-``n`` vectors.
* ``hyperboloid(n)``  curvature -1, realized on the upper sheet of the
  Lorentz quadric ``<x,x>_L = -1`` in R^{n,1}.  Coordinates are ambient
  length-``n+1`` vectors with the timelike coordinate stored LAST, and
  every constructed point is renormalized exactly onto the sheet.
* ``spider(k)``       ``k >= 3`` closed rays glued at a hub (an R-tree).
  A point is ``(leg, radius)``; radius 0 is canonicalized to the hub
  ``(0, 0.0)`` so equality tests are exact.

All operations are pure functions of immutable values.  ``GEO_TOL`` is the
library-wide geometric tolerance used when enforcing invariants; it is
deliberately distinct from the user-facing convergence tolerances of the
iteration engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import DomainError, SpaceMismatch

#: Library-wide tolerance for geometric invariants.
GEO_TOL = 1e-9

#: Maximum violation of ``<x,x>_L = -1`` accepted before construction
#: refuses to repair an input silently.
_SHEET_TOL = 1e-6


class SpaceKind(str, Enum):
    EUCLIDEAN = "euclidean"
    HYPERBOLOID = "hyperboloid"
    SPIDER = "spider"


@dataclass(frozen=True)
class SpaceDescriptor:
    """Identifies one concrete model space.

    ``dim`` applies to the Euclidean and hyperboloid kinds (``dim >= 1``),
    ``legs`` to the spider kind (``legs >= 3``).  The unused field stays 0.
    """

    kind: SpaceKind
    dim: int = 0
    legs: int = 0

    def __post_init__(self) -> None:
        if self.kind is SpaceKind.SPIDER:
            if self.legs < 3:
                raise DomainError("a spider needs at least 3 legs")
            if self.dim != 0:
                raise DomainError("spider spaces have no dim field")
        else:
            if self.dim < 1:
                raise DomainError("dimension must be at least 1")
            if self.legs != 0:
                raise DomainError("legs only applies to spider spaces")

    @property
    def coord_len(self) -> int:
        """Length of a raw coordinate tuple in this space."""
        if self.kind is SpaceKind.EUCLIDEAN:
            return self.dim
        if self.kind is SpaceKind.HYPERBOLOID:
            return self.dim + 1
        return 2

    def __str__(self) -> str:
        if self.kind is SpaceKind.SPIDER:
            return f"spider({self.legs})"
        return f"{self.kind.value}({self.dim})"


def euclidean(dim: int) -> SpaceDescriptor:
    return SpaceDescriptor(SpaceKind.EUCLIDEAN, dim=dim)


def hyperboloid(dim: int) -> SpaceDescriptor:
    return SpaceDescriptor(SpaceKind.HYPERBOLOID, dim=dim)


def spider(legs: int) -> SpaceDescriptor:
    return SpaceDescriptor(SpaceKind.SPIDER, legs=legs)


class Point:
    """A point of one model space.  Treat instances as immutable values.

    Euclidean coords: ``(x_1, ..., x_n)``.  Hyperboloid coords:
    ``(x_1, ..., x_n, x_t)`` with ``x_t = sqrt(1 + sum x_i^2)`` recomputed
    on construction (inputs further than ``1e-6`` off the sheet, or with a
    nonpositive timelike part, are rejected).  Spider coords: ``(leg, r)``
    with ``r == 0`` canonicalized to ``(0, 0.0)``.
    """

    __slots__ = ("space", "coords")

    def __init__(self, space: SpaceDescriptor, coords: Sequence):
        kind = space.kind
        if kind is SpaceKind.EUCLIDEAN:
            c = tuple(float(v) for v in coords)
            if len(c) != space.dim:
                raise DomainError(
                    f"expected {space.dim} coordinates, got {len(c)}")
        elif kind is SpaceKind.HYPERBOLOID:
            c = tuple(float(v) for v in coords)
            if len(c) != space.dim + 1:
                raise DomainError(
                    f"expected {space.dim + 1} ambient coordinates, got {len(c)}")
            tc = c[-1]
            if not tc > 0.0:
                raise DomainError("timelike coordinate must be positive")
            sq = sum(v * v for v in c[:-1])
            if abs(sq - tc * tc + 1.0) > _SHEET_TOL:
                raise DomainError("coordinates are not on the hyperboloid sheet")
            c = c[:-1] + (math.sqrt(1.0 + sq),)
        else:
            leg_raw, r_raw = coords
            leg = int(leg_raw)
            r = float(r_raw)
            if r < 0.0:
                raise DomainError("spider radius must be nonnegative")
            if r == 0.0:
                leg = 0
            elif not 1 <= leg <= space.legs:
                raise DomainError(
                    f"leg must be in 1..{space.legs} for nonzero radius, got {leg}")
            c = (leg, r)
        self.space = space
        self.coords = c

    @property
    def leg(self) -> int:
        if self.space.kind is not SpaceKind.SPIDER:
            raise DomainError("leg only applies to spider points")
        return self.coords[0]

    @property
    def radius(self) -> float:
        if self.space.kind is not SpaceKind.SPIDER:
            raise DomainError("radius only applies to spider points")
        return self.coords[1]

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Point)
                and self.space == other.space
                and self.coords == other.coords)

    def __hash__(self) -> int:
        return hash((self.space, self.coords))

    def __repr__(self) -> str:
        return f"Point({self.space}, {self.coords})"


class TangentVector:
    """A tangent vector at ``base``.

    Euclidean components: length-``dim`` tuple.  Hyperboloid components:
    ambient length-``dim+1`` tuple, re-projected on construction so that
    ``<base, v>_L = 0`` holds exactly up to roundoff.  Spider components:
    ``(leg, s)`` where ``s`` is the signed displacement along the oriented
    line through ``base``'s ray (positive outward on the base leg, negative
    through the hub and out along ``leg``).
    """

    __slots__ = ("base", "components")

    def __init__(self, base: Point, components: Sequence):
        kind = base.space.kind
        if kind is SpaceKind.SPIDER:
            leg_raw, s_raw = components
            leg = int(leg_raw)
            s = float(s_raw)
            if leg != 0 and not 1 <= leg <= base.space.legs:
                raise DomainError(f"leg must be 0 or in 1..{base.space.legs}")
            c = (leg, s)
        else:
            c = tuple(float(v) for v in components)
            if len(c) != base.space.coord_len:
                raise DomainError(
                    f"expected {base.space.coord_len} components, got {len(c)}")
            if kind is SpaceKind.HYPERBOLOID:
                # remove any drift along base; <base,base>_L = -1
                drift = _lorentz(base.coords, c)
                if drift != 0.0:
                    c = tuple(v + drift * b for v, b in zip(c, base.coords))
        self.base = base
        self.components = c

    def norm(self) -> float:
        kind = self.base.space.kind
        if kind is SpaceKind.EUCLIDEAN:
            return math.hypot(*self.components)
        if kind is SpaceKind.HYPERBOLOID:
            return math.sqrt(max(_lorentz(self.components, self.components), 0.0))
        return abs(self.components[1])

    def scaled(self, factor: float) -> "TangentVector":
        if self.base.space.kind is SpaceKind.SPIDER:
            leg, s = self.components
            return TangentVector(self.base, (leg, s * factor))
        return TangentVector(
            self.base, tuple(v * factor for v in self.components))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, TangentVector)
                and self.base == other.base
                and self.components == other.components)

    def __repr__(self) -> str:
        return f"TangentVector({self.base!r}, {self.components})"


def _lorentz(u: Sequence[float], v: Sequence[float]) -> float:
    """Lorentz inner product; the timelike slot is the last one."""
    acc = -u[-1] * v[-1]
    for a, b in zip(u[:-1], v[:-1]):
        acc += a * b
    return acc


def _same_space(a, b) -> None:
    if a.space != b.space:
        raise SpaceMismatch(f"{a.space} vs {b.space}")


def origin(space: SpaceDescriptor) -> Point:
    if space.kind is SpaceKind.EUCLIDEAN:
        return Point(space, (0.0,) * space.dim)
    if space.kind is SpaceKind.HYPERBOLOID:
        return Point(space, (0.0,) * space.dim + (1.0,))
    return Point(space, (0, 0.0))


def hyperboloid_from_spatial(space: SpaceDescriptor,
                             spatial: Sequence[float]) -> Point:
    """Lift spatial coordinates onto the sheet (timelike part computed)."""
    if space.kind is not SpaceKind.HYPERBOLOID:
        raise DomainError("spatial lift only applies to hyperboloid spaces")
    sp = tuple(float(v) for v in spatial)
    if len(sp) != space.dim:
        raise DomainError(f"expected {space.dim} spatial coordinates")
    return Point(space, sp + (math.sqrt(1.0 + sum(v * v for v in sp)),))


def distance(p: Point, q: Point) -> float:
    """Geodesic distance.  Exact formulas per space; the hyperboloid uses a
    cancellation-free rewrite of arcosh(-<p,q>_L) that stays accurate for
    nearby points."""
    _same_space(p, q)
    kind = p.space.kind
    if kind is SpaceKind.EUCLIDEAN:
        return math.dist(p.coords, q.coords)
    if kind is SpaceKind.HYPERBOLOID:
        # -<p,q>_L - 1 = 0.5 <p-q, p-q>_L for on-sheet points
        diff = [a - b for a, b in zip(p.coords, q.coords)]
        h = 0.5 * _lorentz(diff, diff)
        if h <= 0.0:
            return 0.0
        return math.log1p(h + math.sqrt(h * (2.0 + h)))
    l1, r1 = p.coords
    l2, r2 = q.coords
    if l1 == l2 or l1 == 0 or l2 == 0:
        return abs(r1 - r2)
    return r1 + r2


def geodesic_point(p: Point, q: Point, t: float) -> Point:
    """The point gamma(t) on the unique geodesic from ``p`` (t=0) to ``q``
    (t=1), parameterized proportionally to arclength."""
    _same_space(p, q)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"geodesic parameter must lie in [0, 1], got {t}")
    kind = p.space.kind
    if kind is SpaceKind.EUCLIDEAN:
        s = 1.0 - t
        return Point(p.space,
                     tuple(s * a + t * b for a, b in zip(p.coords, q.coords)))
    if kind is SpaceKind.HYPERBOLOID:
        d = distance(p, q)
        if d == 0.0 or t == 0.0:
            return p
        if t == 1.0:
            return q
        # sinh((1-t)d)/sinh(d) and sinh(td)/sinh(d) via expm1 ratios,
        # exact in the d -> 0 limit
        em = math.expm1(-2.0 * d)
        a = math.exp(-t * d) * math.expm1(-2.0 * (1.0 - t) * d) / em
        b = math.exp(-(1.0 - t) * d) * math.expm1(-2.0 * t * d) / em
        return Point(p.space,
                     tuple(a * u + b * v for u, v in zip(p.coords, q.coords)))
    l1, r1 = p.coords
    l2, r2 = q.coords
    if l1 == l2 or l1 == 0 or l2 == 0:
        leg = l1 if l1 != 0 else l2
        r = (1.0 - t) * r1 + t * r2
        return Point(p.space, (leg, max(r, 0.0)))
    s = t * (r1 + r2)
    if s <= r1:
        return Point(p.space, (l1, r1 - s))
    return Point(p.space, (l2, s - r1))


def log_map(base: Point, target: Point) -> TangentVector:
    """Initial velocity of the unit-time geodesic from ``base`` to
    ``target``; its norm equals ``distance(base, target)``."""
    _same_space(base, target)
    kind = base.space.kind
    if kind is SpaceKind.EUCLIDEAN:
        return TangentVector(
            base, tuple(b - a for a, b in zip(base.coords, target.coords)))
    if kind is SpaceKind.HYPERBOLOID:
        d = distance(base, target)
        if d == 0.0:
            return TangentVector(base, (0.0,) * base.space.coord_len)
        coef = d / math.sinh(d)
        ch = math.cosh(d)
        comps = tuple(coef * (v - ch * u)
                      for u, v in zip(base.coords, target.coords))
        return TangentVector(base, comps)
    bl, br = base.coords
    tl, tr = target.coords
    if bl == 0:
        return TangentVector(base, (tl, tr))
    if tl == bl or tl == 0:
        return TangentVector(base, (bl, tr - br))
    return TangentVector(base, (tl, -(br + tr)))


def exp_map(v: TangentVector) -> Point:
    """Follow the geodesic from ``v.base`` with initial velocity ``v`` for
    unit time."""
    base = v.base
    kind = base.space.kind
    if kind is SpaceKind.EUCLIDEAN:
        return Point(base.space,
                     tuple(a + w for a, w in zip(base.coords, v.components)))
    if kind is SpaceKind.HYPERBOLOID:
        n = v.norm()
        if n == 0.0:
            return base
        ch = math.cosh(n)
        sh = math.sinh(n) / n
        return Point(base.space,
                     tuple(ch * a + sh * w
                           for a, w in zip(base.coords, v.components)))
    leg, s = v.components
    bl, br = base.coords
    if bl == 0:
        if s == 0.0:
            return base
        if leg == 0:
            raise DomainError("direction leg required to leave the hub")
        return Point(base.space, (leg, abs(s)))
    c = br + s
    if c >= 0.0:
        return Point(base.space, (bl, c))
    if leg == 0 or leg == bl:
        raise DomainError("crossing the hub needs a distinct destination leg")
    return Point(base.space, (leg, -c))


def tangent_basis(p: Point) -> list[TangentVector]:
    """An orthonormal basis of the tangent space at ``p`` (Euclidean and
    hyperboloid only; a spider has no linear tangent structure)."""
    kind = p.space.kind
    if kind is SpaceKind.EUCLIDEAN:
        n = p.space.dim
        return [TangentVector(p, tuple(1.0 if j == i else 0.0 for j in range(n)))
                for i in range(n)]
    if kind is SpaceKind.SPIDER:
        raise DomainError("spider spaces have no tangent basis")
    n = p.space.dim
    basis: list[tuple[float, ...]] = []
    for i in range(n):
        raw = tuple(1.0 if j == i else 0.0 for j in range(n + 1))
        # project onto the tangent space, then Gram-Schmidt; the Lorentz
        # form is positive definite there
        drift = _lorentz(p.coords, raw)
        cand = [v + drift * b for v, b in zip(raw, p.coords)]
        for prev in basis:
            g = _lorentz(prev, cand)
            cand = [v - g * w for v, w in zip(cand, prev)]
        nn = math.sqrt(max(_lorentz(cand, cand), 0.0))
        if nn <= 1e-12:
            continue
        basis.append(tuple(v / nn for v in cand))
    return [TangentVector(p, b) for b in basis]


def random_point(space: SpaceDescriptor, rng, scale: float = 1.5) -> Point:
    """Draw a random point, used by samplers and verification checks."""
    if space.kind is SpaceKind.EUCLIDEAN:
        return Point(space, tuple(rng.normal(0.0, scale, space.dim)))
    if space.kind is SpaceKind.HYPERBOLOID:
        return hyperboloid_from_spatial(space, rng.normal(0.0, scale, space.dim))
    leg = int(rng.integers(1, space.legs + 1))
    return Point(space, (leg, abs(float(rng.normal(0.0, scale)))))


# --- JSON encoding ---------------------------------------------------------

def space_to_json(space: SpaceDescriptor) -> dict:
    if space.kind is SpaceKind.SPIDER:
        return {"kind": "spider", "legs": space.legs}
    return {"kind": space.kind.value, "dim": space.dim}


def point_to_json(p: Point):
    if p.space.kind is SpaceKind.SPIDER:
        return {"leg": p.coords[0], "r": p.coords[1]}
    return list(p.coords)
