"""Projections, proximal maps, and fixed-point iteration on Hadamard
model spaces (Euclidean, hyperboloid, spider)."""

from .engine import (
    FejerResult,
    IterationConfig,
    IterStatus,
    OperatorChain,
    Projection,
    Resolvent,
    Trace,
    fejer_check,
    picard,
)
from .errors import (
    BadFixedPoint,
    DomainError,
    NoConvergence,
    ParseError,
    SpaceMismatch,
)
from .functions import (
    ConvexFunction,
    DistanceTo,
    Indicator,
    SquaredDistance,
    SquaredDistanceToSet,
    function_from_json,
    numeric_prox,
    prox_objective,
)
from .problems import (
    Feasibility,
    MembershipEntry,
    MultiLambda,
    ProblemReport,
    ProblemSpec,
    SumMinimization,
    build_chain,
    build_feasibility,
    build_multi_lambda,
    build_sum_min,
    has_compact_factor,
    problem_spec_from_json,
    problem_spec_to_json,
    run,
)
from .sets import Ball, ConvexSet, Halfspace, Segment, SpiderLeg, set_from_json
from .spaces import (
    GEO_TOL,
    Point,
    SpaceDescriptor,
    SpaceKind,
    TangentVector,
    distance,
    euclidean,
    exp_map,
    geodesic_point,
    hyperboloid,
    hyperboloid_from_spatial,
    log_map,
    origin,
    point_to_json,
    random_point,
    space_to_json,
    spider,
)

__version__ = "0.1.0"

__all__ = [
    "GEO_TOL",
    "BadFixedPoint",
    "Ball",
    "ConvexFunction",
    "ConvexSet",
    "DistanceTo",
    "DomainError",
    "Feasibility",
    "FejerResult",
    "Halfspace",
    "Indicator",
    "IterStatus",
    "IterationConfig",
    "MembershipEntry",
    "MultiLambda",
    "NoConvergence",
    "OperatorChain",
    "ParseError",
    "Point",
    "ProblemReport",
    "ProblemSpec",
    "Projection",
    "Resolvent",
    "Segment",
    "SpaceDescriptor",
    "SpaceKind",
    "SpaceMismatch",
    "SpiderLeg",
    "SquaredDistance",
    "SquaredDistanceToSet",
    "SumMinimization",
    "TangentVector",
    "Trace",
    "build_chain",
    "build_feasibility",
    "build_multi_lambda",
    "build_sum_min",
    "distance",
    "euclidean",
    "exp_map",
    "fejer_check",
    "function_from_json",
    "geodesic_point",
    "has_compact_factor",
    "hyperboloid",
    "hyperboloid_from_spatial",
    "log_map",
    "numeric_prox",
    "origin",
    "picard",
    "point_to_json",
    "problem_spec_from_json",
    "problem_spec_to_json",
    "prox_objective",
    "random_point",
    "run",
    "set_from_json",
    "space_to_json",
    "spider",
    "__version__",
]
