"""Problem descriptions, chain builders, and the run entry point.

Three problem kinds are supported:

* ``Feasibility(sets)``: cyclic projections onto the listed sets; a run
  that converges lands in the intersection when it is nonempty.
* ``SumMinimization(functions, lambdas)``: one resolvent per summand.  The
  composite targets minimizers of the sum, under the hypothesis that the
  individual minimizer sets share a common point.
* ``MultiLambda(function, lambdas)``: several resolvents of one function
  with distinct parameters.

The common-fixed-point hypothesis cannot be checked symbolically; callers
may supply a witness point, which is verified and recorded in the report's
``hypothesis_note``.  Without a witness the note says "assumed".
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence, Union

from .engine import (IterationConfig, IterStatus, OperatorChain, Projection,
                     Resolvent, Trace, picard)
from .errors import DomainError, ParseError
from .functions import ConvexFunction, function_from_json
from .sets import ConvexSet, set_from_json
from .spaces import Point, SpaceDescriptor, point_to_json, space_to_json

#: Tolerance for validating a supplied witness point.
WITNESS_TOL = 1e-8


@dataclass(frozen=True)
class Feasibility:
    sets: tuple[ConvexSet, ...]
    witness: Point | None = None

    def __post_init__(self) -> None:
        if not self.sets:
            raise DomainError("feasibility needs at least one set")


@dataclass(frozen=True)
class SumMinimization:
    functions: tuple[ConvexFunction, ...]
    lambdas: tuple[float, ...]
    witness: Point | None = None

    def __post_init__(self) -> None:
        if not self.functions:
            raise DomainError("sum minimization needs at least one function")
        if len(self.lambdas) != len(self.functions):
            raise DomainError("need one lambda per function")


@dataclass(frozen=True)
class MultiLambda:
    function: ConvexFunction
    lambdas: tuple[float, ...]
    witness: Point | None = None

    def __post_init__(self) -> None:
        if not self.lambdas:
            raise DomainError("multi-lambda needs at least one parameter")


ProblemKind = Union[Feasibility, SumMinimization, MultiLambda]


@dataclass(frozen=True)
class ProblemSpec:
    space: SpaceDescriptor
    problem: ProblemKind
    x0: Point
    config: IterationConfig


def build_feasibility(sets: Sequence[ConvexSet]) -> OperatorChain:
    """Projection chain in the listed order."""
    sets = tuple(sets)
    if not sets:
        raise DomainError("feasibility needs at least one set")
    return OperatorChain(space=sets[0].space,
                         factors=tuple(Projection(s) for s in sets))


def build_sum_min(functions: Sequence[ConvexFunction],
                  lambdas: Sequence[float]) -> OperatorChain:
    """One resolvent per summand, in the listed order."""
    functions = tuple(functions)
    lambdas = tuple(float(v) for v in lambdas)
    if not functions:
        raise DomainError("sum minimization needs at least one function")
    if len(lambdas) != len(functions):
        raise DomainError("need one lambda per function")
    return OperatorChain(space=functions[0].space,
                         factors=tuple(Resolvent(f, lam)
                                       for f, lam in zip(functions, lambdas)))


def build_multi_lambda(function: ConvexFunction,
                       lambdas: Sequence[float]) -> OperatorChain:
    """Resolvents of one function at several parameters."""
    lambdas = tuple(float(v) for v in lambdas)
    if not lambdas:
        raise DomainError("multi-lambda needs at least one parameter")
    return OperatorChain(space=function.space,
                         factors=tuple(Resolvent(function, lam)
                                       for lam in lambdas))


def has_compact_factor(chain: OperatorChain) -> bool:
    """True when some projection factor acts on a compact set; runs over
    such chains converge strongly and should pass the tail-Cauchy test."""
    return any(isinstance(f, Projection) and f.region.is_compact
               for f in chain.factors)


def build_chain(problem: ProblemKind) -> OperatorChain:
    if isinstance(problem, Feasibility):
        return build_feasibility(problem.sets)
    if isinstance(problem, SumMinimization):
        return build_sum_min(problem.functions, problem.lambdas)
    if isinstance(problem, MultiLambda):
        return build_multi_lambda(problem.function, problem.lambdas)
    raise DomainError(f"unknown problem kind {type(problem).__name__}")


def _hypothesis_note(problem: ProblemKind, chain: OperatorChain) -> str:
    w = problem.witness
    if w is None:
        return "nonempty common fixed set assumed (no witness supplied)"
    for i, f in enumerate(chain.factors):
        d = f.fix_distance(w)
        if d > WITNESS_TOL:
            raise DomainError(
                f"witness fails factor {i} ({f}): fixed-set distance {d:.3e}")
    return "nonempty common fixed set verified via witness"


@dataclass(frozen=True)
class MembershipEntry:
    factor: int
    label: str
    fix_distance: float
    within_tol: bool


@dataclass
class ProblemReport:
    trace: Trace
    limit: Point
    membership: list[MembershipEntry]
    hypothesis_note: str
    compact_factor: bool
    tail_max_step: float
    tail_cauchy_ok: bool

    def to_json_dict(self) -> dict:
        return {
            "space": space_to_json(self.trace.space),
            "status": self.trace.status.value,
            "iterations_used": self.trace.iterations_used,
            "final_residual": self.trace.residuals[-1],
            "limit": point_to_json(self.limit),
            "membership": [
                {"factor": m.factor, "label": m.label,
                 "fix_distance": m.fix_distance, "within_tol": m.within_tol}
                for m in self.membership
            ],
            "hypothesis_note": self.hypothesis_note,
            "compact_factor": self.compact_factor,
            "tail_max_step": self.tail_max_step,
            "tail_cauchy_ok": self.tail_cauchy_ok,
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def run(spec: ProblemSpec) -> ProblemReport:
    """Build the chain, iterate, and assess the limit.

    Membership reports each factor's fixed-set distance at the final
    iterate against ``10 * residual_tol``.  When the run does not converge,
    the hypothesis note is extended: a stalled residual is the symptom of an
    empty common fixed set.

    ``tail_max_step`` is the raw max over the last 10 consecutive-iterate
    steps.  ``tail_cauchy_ok`` asks whether the iterate sequence settled:
    the steps drop below ``step_tol`` at some point and never rise above it
    again.  A run that lands exactly after one sweep (tree geometries do
    this) settles even though its short step history still contains the
    transient."""
    chain = build_chain(spec.problem)
    note = _hypothesis_note(spec.problem, chain)
    trace = picard(chain, spec.x0, spec.config)
    limit = trace.final
    mtol = 10.0 * spec.config.residual_tol
    membership = []
    for i, f in enumerate(chain.factors):
        d = f.fix_distance(limit)
        membership.append(MembershipEntry(i, str(f), d, d <= mtol))
    if trace.status is IterStatus.MAX_ITER_REACHED:
        note += ("; run did not converge, the common fixed set may be empty")
    steps = trace.residuals
    stol = spec.config.step_tol
    crossing = next((i for i, r in enumerate(steps) if r <= stol), None)
    settled = (crossing is not None
               and all(r <= stol for r in steps[crossing:]))
    return ProblemReport(
        trace=trace, limit=limit, membership=membership,
        hypothesis_note=note, compact_factor=has_compact_factor(chain),
        tail_max_step=max(steps[-10:]),
        tail_cauchy_ok=(trace.status is IterStatus.CONVERGED and settled),
    )


# --- JSON codec ------------------------------------------------------------

def problem_spec_to_json(spec: ProblemSpec) -> dict:
    p = spec.problem
    if isinstance(p, Feasibility):
        body: dict = {"kind": "feasibility",
                      "sets": [s.to_json() for s in p.sets]}
    elif isinstance(p, SumMinimization):
        body = {"kind": "sum_min",
                "functions": [f.to_json() for f in p.functions],
                "lambdas": list(p.lambdas)}
    else:
        body = {"kind": "multi_lambda",
                "function": p.function.to_json(),
                "lambdas": list(p.lambdas)}
    if p.witness is not None:
        body["witness"] = point_to_json(p.witness)
    return {
        "space": space_to_json(spec.space),
        "problem": body,
        "x0": point_to_json(spec.x0),
        "config": {
            "max_iter": spec.config.max_iter,
            "residual_tol": spec.config.residual_tol,
            "step_tol": spec.config.step_tol,
            "log_every": spec.config.log_every,
        },
    }


def problem_spec_from_json(obj) -> ProblemSpec:
    from .jsonutil import (as_dict, as_int, as_list, as_number, as_str,
                           parse_point, parse_space, reject_unknown, require)

    top = as_dict(obj, "$")
    reject_unknown(top, {"space", "problem", "x0", "config"}, "$")
    space = parse_space(require(top, "space", "$"), "space")

    pd = as_dict(require(top, "problem", "$"), "problem")
    kind = as_str(require(pd, "kind", "problem"), "problem.kind")
    witness = None
    if kind == "feasibility":
        reject_unknown(pd, {"kind", "sets", "witness"}, "problem")
        raw = as_list(require(pd, "sets", "problem"), "problem.sets")
        sets = tuple(set_from_json(space, s, f"problem.sets[{i}]")
                     for i, s in enumerate(raw))
        if "witness" in pd:
            witness = parse_point(space, pd["witness"], "problem.witness")
        try:
            problem: ProblemKind = Feasibility(sets, witness)
        except DomainError as e:
            raise ParseError("problem.sets", str(e)) from e
    elif kind == "sum_min":
        reject_unknown(pd, {"kind", "functions", "lambdas", "witness"}, "problem")
        raw = as_list(require(pd, "functions", "problem"), "problem.functions")
        funcs = tuple(function_from_json(space, f, f"problem.functions[{i}]")
                      for i, f in enumerate(raw))
        lambdas = _parse_lambdas(pd, "problem")
        if "witness" in pd:
            witness = parse_point(space, pd["witness"], "problem.witness")
        try:
            problem = SumMinimization(funcs, lambdas, witness)
        except DomainError as e:
            raise ParseError("problem", str(e)) from e
    elif kind == "multi_lambda":
        reject_unknown(pd, {"kind", "function", "lambdas", "witness"}, "problem")
        func = function_from_json(space, require(pd, "function", "problem"),
                                  "problem.function")
        lambdas = _parse_lambdas(pd, "problem")
        if "witness" in pd:
            witness = parse_point(space, pd["witness"], "problem.witness")
        try:
            problem = MultiLambda(func, lambdas, witness)
        except DomainError as e:
            raise ParseError("problem", str(e)) from e
    else:
        raise ParseError("problem.kind",
                         f"unknown problem kind {kind!r} (expected "
                         f"feasibility, sum_min, or multi_lambda)")

    x0 = parse_point(space, require(top, "x0", "$"), "x0")

    cd = as_dict(top.get("config", {}), "config")
    reject_unknown(cd, {"max_iter", "residual_tol", "step_tol", "log_every"},
                   "config")
    try:
        config = IterationConfig(
            max_iter=as_int(cd.get("max_iter", 100_000), "config.max_iter"),
            residual_tol=as_number(cd.get("residual_tol", 1e-10),
                                   "config.residual_tol"),
            step_tol=as_number(cd.get("step_tol", 1e-10), "config.step_tol"),
            log_every=as_int(cd.get("log_every", 1), "config.log_every"),
        )
    except DomainError as e:
        raise ParseError("config", str(e)) from e
    return ProblemSpec(space=space, problem=problem, x0=x0, config=config)


def _parse_lambdas(pd: dict, path: str) -> tuple[float, ...]:
    from .jsonutil import as_list, as_number, require

    raw = as_list(require(pd, "lambdas", path), f"{path}.lambdas")
    out = []
    for i, v in enumerate(raw):
        lam = as_number(v, f"{path}.lambdas[{i}]")
        if not lam > 0:
            raise ParseError(f"{path}.lambdas[{i}]", "lambda must be positive")
        out.append(lam)
    return tuple(out)
