"""Randomized verification checks with replayable seeds.

Each check draws its own ``numpy`` generator from an integer seed, counts
violations against an explicit margin convention (margin = quantity minus
its allowed bound, so margin <= 0 is a pass), and reports the worst case.
Negative controls are part of the suite: a harness whose broken inputs do
not produce violations is itself broken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .engine import IterationConfig, OperatorChain, Projection, Resolvent, Trace
from .errors import BadFixedPoint, DomainError
from .functions import Indicator, SquaredDistance, SquaredDistanceToSet
from .problems import (Feasibility, ProblemSpec, build_feasibility, run)
from .sets import Ball, Halfspace, Segment, SpiderLeg
from .spaces import (GEO_TOL, Point, SpaceDescriptor, SpaceKind, distance,
                     euclidean, geodesic_point, hyperboloid,
                     hyperboloid_from_spatial, origin, point_to_json,
                     random_point, spider)


@dataclass
class CheckReport:
    name: str
    samples: int
    violations: int
    worst_margin: float
    witness: dict | None
    seed: int | None
    passed: bool
    notes: str = ""

    def to_json_dict(self) -> dict:
        worst = self.worst_margin if math.isfinite(self.worst_margin) else None
        return {
            "name": self.name, "samples": self.samples,
            "violations": self.violations, "worst_margin": worst,
            "witness": self.witness, "seed": self.seed,
            "passed": self.passed, "notes": self.notes,
        }


def _rng(seed: int):
    return np.random.default_rng(seed)


def _comparison_triangle(d12: float, d13: float, d23: float):
    """Vertices of the Euclidean comparison triangle with the given side
    lengths (degenerate inputs collapse gracefully)."""
    x1 = (0.0, 0.0)
    x2 = (d12, 0.0)
    if d12 == 0.0 or d13 == 0.0:
        return x1, x2, (d13, 0.0)
    c = (d12 * d12 + d13 * d13 - d23 * d23) / (2.0 * d12 * d13)
    c = max(-1.0, min(1.0, c))
    s = math.sqrt(max(0.0, 1.0 - c * c))
    return x1, x2, (d13 * c, d13 * s)


def cat0_triangle_check(space: SpaceDescriptor, n_triangles: int = 1000,
                        n_pairs: int = 10, seed: int = 0,
                        scale: float = 1.5, tol: float = GEO_TOL) -> CheckReport:
    """Comparison inequality: for points p, q on the sides of a random
    triangle, d(p, q) must not exceed the distance of the matched points in
    the Euclidean comparison triangle."""
    rng = _rng(seed)
    sides = ((0, 1), (1, 2), (0, 2))
    samples = 0
    violations = 0
    worst = -math.inf
    witness = None
    for _ in range(n_triangles):
        tri = [random_point(space, rng, scale) for _ in range(3)]
        d = {}
        for (i, j) in sides:
            d[(i, j)] = distance(tri[i], tri[j])
        bar = _comparison_triangle(d[(0, 1)], d[(0, 2)], d[(1, 2)])
        for _ in range(n_pairs):
            si = sides[int(rng.integers(0, 3))]
            sj = sides[int(rng.integers(0, 3))]
            t = float(rng.uniform(0.0, 1.0))
            u = float(rng.uniform(0.0, 1.0))
            p = geodesic_point(tri[si[0]], tri[si[1]], t)
            q = geodesic_point(tri[sj[0]], tri[sj[1]], u)
            pb = _lerp2(bar[si[0]], bar[si[1]], t)
            qb = _lerp2(bar[sj[0]], bar[sj[1]], u)
            margin = distance(p, q) - math.dist(pb, qb)
            samples += 1
            if margin > worst:
                worst = margin
                witness = {
                    "triangle": [point_to_json(v) for v in tri],
                    "sides": [list(si), list(sj)], "params": [t, u],
                    "margin": margin,
                }
            if margin > tol:
                violations += 1
    return CheckReport(
        name=f"cat0_triangle[{space}]", samples=samples,
        violations=violations, worst_margin=worst, witness=witness,
        seed=seed, passed=violations == 0)


def _lerp2(a, b, t: float):
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def geodesic_speed_check(space: SpaceDescriptor, n_samples: int = 1000,
                         seed: int = 0, scale: float = 1.5,
                         tol: float = 1e-8) -> CheckReport:
    """|d(g(t), g(s)) - |t - s| d(p, q)| must stay within ``tol`` (relative
    to the endpoint distance for long geodesics)."""
    rng = _rng(seed)
    violations = 0
    worst = -math.inf
    witness = None
    for _ in range(n_samples):
        p = random_point(space, rng, scale)
        q = random_point(space, rng, scale)
        t = float(rng.uniform(0.0, 1.0))
        s = float(rng.uniform(0.0, 1.0))
        d = distance(p, q)
        dev = abs(distance(geodesic_point(p, q, t), geodesic_point(p, q, s))
                  - abs(t - s) * d)
        margin = dev - tol * max(1.0, d)
        if margin > worst:
            worst = margin
            witness = {"p": point_to_json(p), "q": point_to_json(q),
                       "t": t, "s": s, "deviation": dev}
        if margin > 0.0:
            violations += 1
    return CheckReport(
        name=f"geodesic_speed[{space}]", samples=n_samples,
        violations=violations, worst_margin=worst, witness=witness,
        seed=seed, passed=violations == 0)


def quasi_nonexpansive_check(op, fixed_points: Sequence[Point],
                             n_samples: int = 200, seed: int = 0,
                             scale: float = 2.0,
                             tol: float = GEO_TOL) -> CheckReport:
    """d(S x, q) <= d(x, q) for sampled x and each supplied fixed point q.
    Raises BadFixedPoint when a supplied q moves under the map."""
    apply: Callable[[Point], Point] = op.apply if hasattr(op, "apply") else op
    if not fixed_points:
        raise DomainError("need at least one fixed point")
    space = fixed_points[0].space
    for q in fixed_points:
        r = distance(q, apply(q))
        if r > tol:
            raise BadFixedPoint(
                f"offered fixed point moves by {r:.3e} under the map")
    rng = _rng(seed)
    samples = 0
    violations = 0
    worst = -math.inf
    witness = None
    for _ in range(n_samples):
        x = random_point(space, rng, scale)
        sx = apply(x)
        for q in fixed_points:
            margin = distance(sx, q) - distance(x, q)
            samples += 1
            if margin > worst:
                worst = margin
                witness = {"x": point_to_json(x), "q": point_to_json(q),
                           "margin": margin}
            if margin > tol:
                violations += 1
    name = getattr(op, "__name__", None) or str(op)
    return CheckReport(
        name=f"quasi_nonexpansive[{name}]", samples=samples,
        violations=violations, worst_margin=worst, witness=witness,
        seed=seed, passed=violations == 0)


def fixed_point_identity_check(chain: OperatorChain, n_samples: int = 100,
                               seed: int = 0, tol: float = GEO_TOL,
                               samplers: Sequence[Callable] | None = None,
                               max_draw_factor: int = 200) -> CheckReport:
    """Fix(S_m ... S_1) = intersection of the factor fixed sets, sampled.

    Forward direction: points drawn from the intersection (rejection over
    the factor samplers) must be chain-fixed within ``tol``.  Backward
    direction: any sampled point that is chain-fixed must be fixed by every
    factor within ``10 tol``.  When no intersection sample can be drawn the
    check fails and flags a possibly empty intersection."""
    rng = _rng(seed)
    samplers = list(samplers) if samplers is not None else [
        f.sample_fix for f in chain.factors]
    accepted: list[Point] = []
    draws = 0
    budget = max_draw_factor * n_samples
    k = 0
    while len(accepted) < n_samples and draws < budget:
        x = samplers[k % len(samplers)](rng)
        k += 1
        draws += 1
        if all(f.fix_distance(x) <= tol for f in chain.factors):
            accepted.append(x)

    samples = 0
    violations = 0
    worst = -math.inf
    witness = None

    def note_case(margin, info):
        nonlocal worst, witness, violations
        if margin > worst:
            worst = margin
            witness = info
        if margin > 0.0:
            violations += 1

    for x in accepted:
        margin = chain.residual(x) - tol
        samples += 1
        note_case(margin, {"direction": "forward", "x": point_to_json(x),
                           "chain_residual": margin + tol})

    # backward pool: the accepted intersection samples plus ambient draws
    pool = list(accepted)
    pool += [random_point(chain.space, rng, 2.0) for _ in range(n_samples)]
    checked_backward = 0
    for x in pool:
        if chain.residual(x) > tol:
            continue
        checked_backward += 1
        y = x
        for i, f in enumerate(chain.factors):
            margin = f.fix_distance(y) - 10.0 * tol
            samples += 1
            note_case(margin, {"direction": "backward", "factor": i,
                               "x": point_to_json(x)})
            y = f.apply(y)

    notes = ""
    passed = violations == 0
    if not accepted:
        passed = False
        notes = (f"no common fixed-point samples in {draws} draws; "
                 f"intersection may be empty")
    return CheckReport(
        name=f"fixed_point_identity[{chain.space}, m={len(chain.factors)}]",
        samples=samples, violations=violations,
        worst_margin=worst if samples else 0.0, witness=witness, seed=seed,
        passed=passed, notes=notes)


def residual_vanishing_check(trace: Trace,
                             residual_tol: float = 1e-6) -> CheckReport:
    """The residual sequence must cross below ``residual_tol`` and stay
    there: no recorded value after the first crossing may exceed the
    threshold again, and a sequence that never crosses fails outright.

    The threshold is a "has vanished" scale, not the run's stopping
    tolerance: a geometrically converging run stops at the first residual
    below its stopping tolerance, so the values before that crossing exceed
    it by the convergence rate.  Pass the run's own tolerance explicitly
    for the strict reading."""
    tol = residual_tol
    res = trace.residuals
    crossing = next((i for i, r in enumerate(res) if r <= tol), None)
    checked = res if crossing is None else res[crossing:]
    violations = sum(1 for r in checked if r > tol)
    worst = max(r - tol for r in checked)
    return CheckReport(
        name="residual_vanishing", samples=len(checked),
        violations=violations, worst_margin=worst,
        witness={"first_crossing": crossing, "final": res[-1],
                 "residual_tol": tol},
        seed=None, passed=violations == 0)


# --- canned configurations used by the suite and the acceptance battery ----

def doubling_map(space: SpaceDescriptor) -> Callable[[Point], Point]:
    """x -> 2x on a Euclidean space; expansive, fails quasi-nonexpansiveness
    against its fixed point at the origin."""
    if space.kind is not SpaceKind.EUCLIDEAN:
        raise DomainError("the doubling control is Euclidean")

    def apply(x: Point) -> Point:
        return Point(space, tuple(2.0 * v for v in x.coords))

    apply.__name__ = "doubling_map"
    return apply


def identity_chain_configs(kind: SpaceKind) -> list[tuple[str, OperatorChain]]:
    """Mixed projection/resolvent chains with nonempty, samplable
    common fixed sets; at least five per space kind."""
    if kind is SpaceKind.EUCLIDEAN:
        sp = euclidean(2)
        o = origin(sp)
        b0 = Ball(o, 2.0)
        b1 = Ball(Point(sp, (1.0, 0.0)), 2.0)
        hs = Halfspace(sp, (0.0, 1.0), 0.0)
        seg = Segment(Point(sp, (-2.0, 0.0)), Point(sp, (2.0, 0.0)))
        anchor = Point(sp, (0.5, -0.5))
        return [
            ("balls", OperatorChain(sp, (Projection(b0), Projection(b1)))),
            ("ball_halfspace", OperatorChain(sp, (Projection(b0), Projection(hs)))),
            ("segment_ball", OperatorChain(sp, (Projection(seg), Projection(b0)))),
            ("indicator_halfspace",
             OperatorChain(sp, (Resolvent(Indicator(b0), 1.0), Projection(hs)))),
            ("sqset_ball",
             OperatorChain(sp, (Resolvent(SquaredDistanceToSet(b0), 0.7),
                                Projection(b1)))),
            ("anchored",
             OperatorChain(sp, (Resolvent(SquaredDistance(anchor), 1.0),
                                Projection(b0),
                                Resolvent(Indicator(b1), 2.0)))),
        ]
    if kind is SpaceKind.HYPERBOLOID:
        sp = hyperboloid(2)
        o = origin(sp)
        c2 = hyperboloid_from_spatial(sp, (math.sinh(1.0), 0.0))
        b0 = Ball(o, 1.2)
        b1 = Ball(c2, 1.2)
        seg = Segment(hyperboloid_from_spatial(sp, (-1.0, 0.0)),
                      hyperboloid_from_spatial(sp, (1.0, 0.0)))
        anchor = geodesic_point(o, c2, 0.5)
        return [
            ("balls", OperatorChain(sp, (Projection(b0), Projection(b1)))),
            ("segment_ball", OperatorChain(sp, (Projection(seg), Projection(b0)))),
            ("indicator_ball",
             OperatorChain(sp, (Resolvent(Indicator(b0), 1.5), Projection(b1)))),
            ("sqset_indicator",
             OperatorChain(sp, (Resolvent(SquaredDistanceToSet(b0), 1.0),
                                Resolvent(Indicator(b1), 1.0)))),
            ("anchored",
             OperatorChain(sp, (Resolvent(SquaredDistance(anchor), 1.0),
                                Projection(b0), Projection(b1)))),
        ]
    sp = spider(3)
    o = origin(sp)
    leg1 = SpiderLeg(sp, 1)
    hub_ball = Ball(o, 1.5)
    far_ball = Ball(Point(sp, (1, 1.0)), 1.0)
    seg = Segment(Point(sp, (1, 2.0)), Point(sp, (2, 1.0)))
    anchor = Point(sp, (1, 1.0))
    return [
        ("leg_ball", OperatorChain(sp, (Projection(leg1), Projection(hub_ball)))),
        ("ball_leg", OperatorChain(sp, (Projection(far_ball), Projection(leg1)))),
        ("segment_ball", OperatorChain(sp, (Projection(seg), Projection(hub_ball)))),
        ("indicator_leg",
         OperatorChain(sp, (Resolvent(Indicator(hub_ball), 1.0), Projection(leg1)))),
        ("sqset_leg",
         OperatorChain(sp, (Resolvent(SquaredDistanceToSet(leg1), 0.5),
                            Resolvent(Indicator(hub_ball), 1.0)))),
        ("anchored",
         OperatorChain(sp, (Resolvent(SquaredDistance(anchor), 1.0),
                            Projection(leg1), Projection(far_ball)))),
    ]


def disjoint_chain(kind: SpaceKind) -> OperatorChain:
    """Projections onto two balls that do not meet (negative control)."""
    if kind is SpaceKind.EUCLIDEAN:
        sp = euclidean(2)
        return build_feasibility([Ball(Point(sp, (-3.0, 0.0)), 1.0),
                                  Ball(Point(sp, (3.0, 0.0)), 1.0)])
    if kind is SpaceKind.HYPERBOLOID:
        sp = hyperboloid(2)
        return build_feasibility([
            Ball(hyperboloid_from_spatial(sp, (-math.sinh(3.0), 0.0)), 1.0),
            Ball(hyperboloid_from_spatial(sp, (math.sinh(3.0), 0.0)), 1.0)])
    sp = spider(3)
    return build_feasibility([Ball(Point(sp, (1, 3.0)), 1.0),
                              Ball(Point(sp, (2, 3.0)), 1.0)])


def feasibility_demo(kind: SpaceKind) -> tuple[ProblemSpec, Point]:
    """A well-posed feasibility problem per space, with a fixed point of the
    chain for Fejer checking.  Returns (spec, common fixed point)."""
    cfg = IterationConfig(max_iter=10_000, residual_tol=1e-12,
                          step_tol=1e-6, log_every=1)
    if kind is SpaceKind.EUCLIDEAN:
        sp = euclidean(2)
        sets = (Ball(Point(sp, (0.0, 2.0)), 2.0),
                Halfspace(sp, (0.0, 1.0), 1.0))
        spec = ProblemSpec(sp, Feasibility(sets, witness=Point(sp, (0.0, 0.5))),
                           Point(sp, (4.0, 4.0)), cfg)
        return spec, Point(sp, (0.0, 0.5))
    if kind is SpaceKind.HYPERBOLOID:
        sp = hyperboloid(2)
        c1 = origin(sp)
        c2 = hyperboloid_from_spatial(sp, (math.sinh(1.0), 0.0))
        mid = geodesic_point(c1, c2, 0.5)
        sets = (Ball(c1, 0.8), Ball(c2, 0.8))
        spec = ProblemSpec(sp, Feasibility(sets, witness=mid),
                           hyperboloid_from_spatial(sp, (2.0, -1.0)), cfg)
        return spec, mid
    sp = spider(3)
    sets = (SpiderLeg(sp, 1), Ball(origin(sp), 1.0))
    q = Point(sp, (1, 0.5))
    spec = ProblemSpec(sp, Feasibility(sets, witness=q), Point(sp, (1, 3.0)), cfg)
    return spec, q


def lens_demo(kind: SpaceKind) -> ProblemSpec:
    """Two unit balls overlapping in a thin lens, approached from outside.

    The ball boundaries cross at roughly 45 degrees, so alternating
    projections slide into the lens tip at a measured rate near 0.5 per
    sweep.  With residual_tol 1e-12 and step_tol 1e-6 the run takes ~40
    sweeps and its last 10 steps all sit below step_tol, which is the
    regime the compact-factor tail check is about.  Not defined for the
    spider: tree projections land exactly, so no geometric tail exists."""
    cfg = IterationConfig(max_iter=10_000, residual_tol=1e-12, step_tol=1e-6,
                          log_every=1)
    if kind is SpaceKind.EUCLIDEAN:
        sp = euclidean(2)
        sets = (Ball(Point(sp, (-0.924, 0.0)), 1.0),
                Ball(Point(sp, (0.924, 0.0)), 1.0))
        tip = Point(sp, (0.0, math.sqrt(1.0 - 0.924 ** 2)))
        return ProblemSpec(sp, Feasibility(sets, witness=tip),
                           Point(sp, (2.5, 3.0)), cfg)
    if kind is SpaceKind.HYPERBOLOID:
        sp = hyperboloid(2)
        sets = (Ball(hyperboloid_from_spatial(sp, (-math.sinh(0.95), 0.0)), 1.0),
                Ball(hyperboloid_from_spatial(sp, (math.sinh(0.95), 0.0)), 1.0))
        return ProblemSpec(sp, Feasibility(sets, witness=origin(sp)),
                           hyperboloid_from_spatial(sp, (2.0, 2.0)), cfg)
    raise DomainError("no thin-lens run exists on a spider")


def disjoint_demo(kind: SpaceKind) -> ProblemSpec:
    """An empty-intersection run that exhausts its iteration budget.

    Alternating projections between two disjoint balls converge to the
    nearest-point pair, so the chain residual does vanish eventually; the
    decay rate is roughly 1/(1+gap)^2 per sweep.  A 0.01 gap keeps the
    residual above 1e-5 for the whole 200-iteration budget, leaving the
    run honestly at MaxIterReached with both memberships violated.

    No spider variant exists: projections on a tree land exactly, so the
    orbit reaches the nearest-pair cycle in at most two sweeps and every
    spider run converges.  DomainError for the spider kind."""
    cfg = IterationConfig(max_iter=200, residual_tol=1e-10, step_tol=1e-10,
                          log_every=1)
    if kind is SpaceKind.EUCLIDEAN:
        sp = euclidean(2)
        sets = (Ball(Point(sp, (-1.005, 0.0)), 1.0),
                Ball(Point(sp, (1.005, 0.0)), 1.0))
        x0 = Point(sp, (0.0, 2.0))
    elif kind is SpaceKind.HYPERBOLOID:
        sp = hyperboloid(2)
        sets = (Ball(hyperboloid_from_spatial(sp, (-math.sinh(1.005), 0.0)), 1.0),
                Ball(hyperboloid_from_spatial(sp, (math.sinh(1.005), 0.0)), 1.0))
        x0 = hyperboloid_from_spatial(sp, (0.0, 1.0))
    else:
        raise DomainError(
            "spider projections land exactly; no disjoint spider run "
            "can exhaust its budget")
    return ProblemSpec(sp, Feasibility(sets), x0, cfg)


# --- suite -----------------------------------------------------------------

@dataclass
class SuiteEntry:
    report: CheckReport
    expect_pass: bool

    @property
    def ok(self) -> bool:
        return self.report.passed == self.expect_pass

    def to_json_dict(self) -> dict:
        d = self.report.to_json_dict()
        d["expect_pass"] = self.expect_pass
        d["ok"] = self.ok
        return d


_KIND_SPACES = {
    SpaceKind.EUCLIDEAN: (euclidean(2), euclidean(5)),
    SpaceKind.HYPERBOLOID: (hyperboloid(2), hyperboloid(3)),
    SpaceKind.SPIDER: (spider(3), spider(5)),
}


def _child_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence((seed, index)).generate_state(1)[0])


def run_suite(kinds: Sequence[SpaceKind], seed: int = 42,
              n_triangles: int = 2000, n_pairs: int = 10,
              n_samples: int = 400) -> list[SuiteEntry]:
    """The full battery for the requested space kinds: geometry checks,
    operator checks, fixed-point identity over the canned configurations,
    one convergent run, and the negative controls."""
    entries: list[SuiteEntry] = []
    idx = 0

    def child() -> int:
        nonlocal idx
        idx += 1
        return _child_seed(seed, idx)

    def positive(report: CheckReport) -> None:
        entries.append(SuiteEntry(report, expect_pass=True))

    def negative(report: CheckReport) -> None:
        entries.append(SuiteEntry(report, expect_pass=False))

    for kind in kinds:
        lo, hi = _KIND_SPACES[kind]
        positive(cat0_triangle_check(lo, n_triangles, n_pairs, seed=child()))
        positive(cat0_triangle_check(hi, n_triangles, n_pairs, seed=child()))
        positive(geodesic_speed_check(lo, max(n_samples, 1000), seed=child()))

        # operator checks on the first canned chain's ingredients
        configs = identity_chain_configs(kind)
        first_chain = configs[0][1]
        proj = first_chain.factors[0]
        rng = _rng(child())
        fixed = [proj.sample_fix(rng) for _ in range(5)]
        positive(quasi_nonexpansive_check(proj, fixed, n_samples=n_samples,
                                          seed=child()))
        anchor = random_point(lo, _rng(child()), 1.0)
        res = Resolvent(SquaredDistance(anchor), 1.0)
        positive(quasi_nonexpansive_check(res, [anchor], n_samples=n_samples,
                                          seed=child()))

        for label, chain in configs:
            rep = fixed_point_identity_check(chain, n_samples=min(n_samples, 100),
                                             seed=child())
            rep.name += f"/{label}"
            positive(rep)

        spec, _ = feasibility_demo(kind)
        rep = run(spec)
        positive(residual_vanishing_check(rep.trace))

        # negative controls
        neg = fixed_point_identity_check(disjoint_chain(kind),
                                         n_samples=min(n_samples, 50),
                                         seed=child())
        neg.name += "/disjoint"
        negative(neg)
        if kind is not SpaceKind.SPIDER:
            bad = run(disjoint_demo(kind))
            negative(residual_vanishing_check(bad.trace))
        if kind is SpaceKind.EUCLIDEAN:
            dm = doubling_map(lo)
            negative(quasi_nonexpansive_check(dm, [origin(lo)],
                                              n_samples=n_samples, seed=child()))
    return entries


def suite_passed(entries: Sequence[SuiteEntry]) -> bool:
    return all(e.ok for e in entries)


def suite_to_json_dict(entries: Sequence[SuiteEntry], seed: int) -> dict:
    return {
        "seed": seed,
        "passed": suite_passed(entries),
        "checks": [e.to_json_dict() for e in entries],
    }
