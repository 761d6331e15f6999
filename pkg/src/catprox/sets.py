"""Closed convex sets with metric projections.

Every shape knows how to project (``project``), test membership
(``contains``), sample its own points (``sample``, used by the verification
harness), report compactness (``is_compact``, drives the strong-convergence
flag on reports), and serialize itself (``to_json``).

Projections are quasi-nonexpansive with fixed set equal to the set itself,
which is what the iteration engine relies on.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoConvergence, ParseError, SpaceMismatch
from .search import golden_section
from .spaces import (GEO_TOL, Point, SpaceDescriptor, SpaceKind, _same_space,
                     distance, geodesic_point, point_to_json)


def _check_space(x: Point, space: SpaceDescriptor) -> None:
    if x.space != space:
        raise SpaceMismatch(f"{x.space} vs {space}")


class ConvexSet(abc.ABC):
    """A closed convex subset of one model space."""

    space: SpaceDescriptor

    @abc.abstractmethod
    def project(self, x: Point) -> Point:
        """The unique nearest point of the set."""

    @abc.abstractmethod
    def sample(self, rng) -> Point:
        """A random member of the set."""

    @property
    @abc.abstractmethod
    def is_compact(self) -> bool:
        ...

    @abc.abstractmethod
    def to_json(self) -> dict:
        ...

    def contains(self, x: Point, tol: float = GEO_TOL) -> bool:
        return distance(x, self.project(x)) <= tol


@dataclass(frozen=True)
class Ball(ConvexSet):
    """Closed metric ball.  The projection of an outside point is the point
    on the geodesic [center, x] at distance ``radius`` from the center; the
    triangle inequality shows this is nearest in any geodesic space."""

    center: Point
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise DomainError("ball radius must be positive")

    @property
    def space(self) -> SpaceDescriptor:
        return self.center.space

    def project(self, x: Point) -> Point:
        d = distance(self.center, x)
        if d <= self.radius:
            return x
        return geodesic_point(self.center, x, self.radius / d)

    def sample(self, rng) -> Point:
        kind = self.space.kind
        if kind is SpaceKind.EUCLIDEAN:
            # rejection from the bounding box
            c = self.center.coords
            r = self.radius
            for _ in range(100_000):
                y = tuple(cv + float(u) for cv, u in
                          zip(c, rng.uniform(-r, r, len(c))))
                cand = Point(self.space, y)
                if distance(self.center, cand) <= r:
                    return cand
            raise NoConvergence("ball rejection sampling stalled")
        if kind is SpaceKind.HYPERBOLOID:
            from .spaces import TangentVector, exp_map, tangent_basis
            basis = tangent_basis(self.center)
            coef = rng.normal(0.0, 1.0, len(basis))
            comps = [0.0] * self.space.coord_len
            for w, b in zip(coef, basis):
                for i, v in enumerate(b.components):
                    comps[i] += float(w) * v
            vec = TangentVector(self.center, comps)
            n = vec.norm()
            if n == 0.0:
                return self.center
            u = float(rng.uniform(0.0, self.radius))
            return exp_map(vec.scaled(u / n))
        cl, cr = self.center.coords
        s = float(rng.uniform(-self.radius, self.radius))
        c = cr + s
        if c >= 0.0:
            leg = cl if cl != 0 else int(rng.integers(1, self.space.legs + 1))
            return Point(self.space, (leg, c))
        others = [k for k in range(1, self.space.legs + 1) if k != cl]
        leg = others[int(rng.integers(0, len(others)))]
        return Point(self.space, (leg, -c))

    @property
    def is_compact(self) -> bool:
        return True

    def to_json(self) -> dict:
        tag = "spider_ball" if self.space.kind is SpaceKind.SPIDER else "ball"
        return {"type": tag, "center": point_to_json(self.center),
                "radius": self.radius}

    def __str__(self) -> str:
        return f"ball(center={self.center.coords}, radius={self.radius})"


@dataclass(frozen=True)
class Segment(ConvexSet):
    """Geodesic segment [a, b].  The degenerate case a == b is allowed and
    projects everything to ``a``.

    Euclidean segments project by clamping the affine parameter of the
    orthogonal foot point.  Elsewhere the projection minimizes the squared
    distance along the segment with a golden-section search (the squared
    metric is strongly convex along geodesics, so the restriction is
    unimodal with a unique minimizer); the search resolves the parameter to
    roughly sqrt(eps) relative to the current distance."""

    a: Point
    b: Point

    def __post_init__(self) -> None:
        _same_space(self.a, self.b)

    @property
    def space(self) -> SpaceDescriptor:
        return self.a.space

    def project(self, x: Point) -> Point:
        _same_space(x, self.a)
        if self.a == self.b:
            return self.a
        if self.space.kind is SpaceKind.EUCLIDEAN:
            av = np.asarray(self.a.coords)
            dv = np.asarray(self.b.coords) - av
            t = float(np.dot(np.asarray(x.coords) - av, dv) / np.dot(dv, dv))
            t = min(max(t, 0.0), 1.0)
            return Point(self.space, tuple(av + t * dv))

        def sq(t: float) -> float:
            return distance(x, geodesic_point(self.a, self.b, t)) ** 2

        t = golden_section(sq)
        return geodesic_point(self.a, self.b, t)

    def sample(self, rng) -> Point:
        return geodesic_point(self.a, self.b, float(rng.uniform(0.0, 1.0)))

    @property
    def is_compact(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"type": "segment", "a": point_to_json(self.a),
                "b": point_to_json(self.b)}

    def __str__(self) -> str:
        return f"segment({self.a.coords} -> {self.b.coords})"


@dataclass(frozen=True)
class Halfspace(ConvexSet):
    """Euclidean halfspace {x : <normal, x> <= offset}.  The normal is
    rescaled to unit length on construction (offset rescaled with it)."""

    space: SpaceDescriptor
    normal: tuple[float, ...]
    offset: float

    def __post_init__(self) -> None:
        if self.space.kind is not SpaceKind.EUCLIDEAN:
            raise DomainError("halfspaces are only supported in Euclidean spaces")
        n = tuple(float(v) for v in self.normal)
        if len(n) != self.space.dim:
            raise DomainError(f"normal must have {self.space.dim} components")
        nn = sum(v * v for v in n) ** 0.5
        if nn == 0.0:
            raise DomainError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", tuple(v / nn for v in n))
        object.__setattr__(self, "offset", float(self.offset) / nn)

    def project(self, x: Point) -> Point:
        _check_space(x, self.space)
        g = sum(n * v for n, v in zip(self.normal, x.coords)) - self.offset
        if g <= 0.0:
            return x
        return Point(self.space,
                     tuple(v - g * n for n, v in zip(self.normal, x.coords)))

    def sample(self, rng) -> Point:
        y = Point(self.space, tuple(rng.normal(0.0, 2.0, self.space.dim)))
        return self.project(y)

    @property
    def is_compact(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"type": "halfspace", "normal": list(self.normal),
                "offset": self.offset}

    def __str__(self) -> str:
        return f"halfspace(normal={self.normal}, offset={self.offset})"


@dataclass(frozen=True)
class SpiderLeg(ConvexSet):
    """One closed ray of a spider, hub included.  Points on other legs
    project to the hub."""

    space: SpaceDescriptor
    leg: int

    def __post_init__(self) -> None:
        if self.space.kind is not SpaceKind.SPIDER:
            raise DomainError("SpiderLeg requires a spider space")
        if not 1 <= self.leg <= self.space.legs:
            raise DomainError(f"leg must be in 1..{self.space.legs}")

    def project(self, x: Point) -> Point:
        _check_space(x, self.space)
        if x.coords[0] in (0, self.leg):
            return x
        return Point(self.space, (0, 0.0))

    def sample(self, rng) -> Point:
        return Point(self.space, (self.leg, abs(float(rng.normal(0.0, 2.0)))))

    @property
    def is_compact(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"type": "spider_leg", "leg": self.leg}

    def __str__(self) -> str:
        return f"spider_leg({self.leg})"


# --- JSON decoding ---------------------------------------------------------

def set_from_json(space: SpaceDescriptor, obj, path: str) -> ConvexSet:
    from .jsonutil import (as_dict, as_int, as_number, as_vector, parse_point,
                           reject_unknown, require)

    d = as_dict(obj, path)
    tag = require(d, "type", path)
    if tag in ("ball", "spider_ball"):
        reject_unknown(d, {"type", "center", "radius"}, path)
        center = parse_point(space, require(d, "center", path), f"{path}.center")
        radius = as_number(require(d, "radius", path), f"{path}.radius")
        try:
            return Ball(center, radius)
        except DomainError as e:
            raise ParseError(f"{path}.radius", str(e)) from e
    if tag == "segment":
        reject_unknown(d, {"type", "a", "b"}, path)
        return Segment(parse_point(space, require(d, "a", path), f"{path}.a"),
                       parse_point(space, require(d, "b", path), f"{path}.b"))
    if tag == "halfspace":
        reject_unknown(d, {"type", "normal", "offset"}, path)
        normal = as_vector(require(d, "normal", path), f"{path}.normal")
        offset = as_number(require(d, "offset", path), f"{path}.offset")
        try:
            return Halfspace(space, normal, offset)
        except DomainError as e:
            raise ParseError(path, str(e)) from e
    if tag == "spider_leg":
        reject_unknown(d, {"type", "leg"}, path)
        leg = as_int(require(d, "leg", path), f"{path}.leg")
        try:
            return SpiderLeg(space, leg)
        except DomainError as e:
            raise ParseError(f"{path}.leg", str(e)) from e
    raise ParseError(f"{path}.type",
                     f"unknown set type {tag!r} (expected ball, segment, "
                     f"halfspace, spider_leg, or spider_ball)")
