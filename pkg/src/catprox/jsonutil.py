"""Small strict-parsing helpers for the JSON problem schema.

Every helper raises ParseError with the offending field path, so CLI users
get ``problem.sets[1].radius: ...`` instead of a stack trace.
"""

from __future__ import annotations

from .errors import DomainError, ParseError
from .spaces import Point, SpaceDescriptor, SpaceKind


def as_dict(v, path: str) -> dict:
    if not isinstance(v, dict):
        raise ParseError(path, f"expected an object, got {type(v).__name__}")
    return v


def as_list(v, path: str) -> list:
    if not isinstance(v, list):
        raise ParseError(path, f"expected an array, got {type(v).__name__}")
    return v


def as_number(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(path, f"expected a number, got {type(v).__name__}")
    return float(v)


def as_int(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(path, f"expected an integer, got {type(v).__name__}")
    return v


def as_str(v, path: str) -> str:
    if not isinstance(v, str):
        raise ParseError(path, f"expected a string, got {type(v).__name__}")
    return v


def as_vector(v, path: str) -> tuple[float, ...]:
    return tuple(as_number(c, f"{path}[{i}]") for i, c in enumerate(as_list(v, path)))


def require(d: dict, key: str, path: str):
    if key not in d:
        raise ParseError(f"{path}.{key}", "missing required field")
    return d[key]


def reject_unknown(d: dict, allowed: set, path: str) -> None:
    extra = set(d) - allowed
    if extra:
        raise ParseError(f"{path}.{sorted(extra)[0]}", "unexpected field")


def parse_space(obj, path: str = "space") -> SpaceDescriptor:
    d = as_dict(obj, path)
    kind = as_str(require(d, "kind", path), f"{path}.kind")
    try:
        if kind == "spider":
            reject_unknown(d, {"kind", "legs"}, path)
            return SpaceDescriptor(SpaceKind.SPIDER,
                                   legs=as_int(require(d, "legs", path),
                                               f"{path}.legs"))
        if kind in ("euclidean", "hyperboloid"):
            reject_unknown(d, {"kind", "dim"}, path)
            return SpaceDescriptor(SpaceKind(kind),
                                   dim=as_int(require(d, "dim", path),
                                              f"{path}.dim"))
    except DomainError as e:
        raise ParseError(path, str(e)) from e
    raise ParseError(f"{path}.kind",
                     f"unknown space kind {kind!r} "
                     f"(expected euclidean, hyperboloid, or spider)")


def parse_point(space: SpaceDescriptor, obj, path: str) -> Point:
    if space.kind is SpaceKind.SPIDER:
        d = as_dict(obj, path)
        reject_unknown(d, {"leg", "r"}, path)
        leg = as_int(require(d, "leg", path), f"{path}.leg")
        r = as_number(require(d, "r", path), f"{path}.r")
        try:
            return Point(space, (leg, r))
        except DomainError as e:
            raise ParseError(path, str(e)) from e
    coords = as_vector(obj, path)
    try:
        return Point(space, coords)
    except DomainError as e:
        raise ParseError(path, str(e)) from e
