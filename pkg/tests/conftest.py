import math

import pytest
from hypothesis import strategies as st

from catprox.spaces import (
    Point,
    SpaceDescriptor,
    SpaceKind,
    euclidean,
    hyperboloid,
    hyperboloid_from_spatial,
    spider,
)

E2 = euclidean(2)
E5 = euclidean(5)
H2 = hyperboloid(2)
H3 = hyperboloid(3)
S3 = spider(3)
S5 = spider(5)

ALL_SPACES = (E2, E5, H2, H3, S3, S5)

finite_coord = st.floats(min_value=-5.0, max_value=5.0,
                         allow_nan=False, allow_infinity=False)
unit_t = st.floats(min_value=0.0, max_value=1.0,
                   allow_nan=False, allow_infinity=False)


@st.composite
def point_in(draw, space: SpaceDescriptor):
    """A point with coordinates bounded away from overflow territory."""
    if space.kind is SpaceKind.EUCLIDEAN:
        coords = tuple(draw(finite_coord) for _ in range(space.dim))
        return Point(space, coords)
    if space.kind is SpaceKind.HYPERBOLOID:
        spatial = tuple(draw(finite_coord) for _ in range(space.dim))
        return hyperboloid_from_spatial(space, spatial)
    leg = draw(st.integers(min_value=1, max_value=space.legs))
    r = draw(st.floats(min_value=0.0, max_value=5.0,
                       allow_nan=False, allow_infinity=False))
    return Point(space, (leg, r))


def space_strategy():
    return st.sampled_from(ALL_SPACES)


@st.composite
def space_and_points(draw, n: int):
    space = draw(space_strategy())
    return space, tuple(draw(point_in(space)) for _ in range(n))


def assert_close(a: float, b: float, tol: float = 1e-9) -> None:
    assert math.isclose(a, b, rel_tol=tol, abs_tol=tol), f"{a} != {b}"


@pytest.fixture
def e2():
    return E2


@pytest.fixture
def h2():
    return H2


@pytest.fixture
def s3():
    return S3
