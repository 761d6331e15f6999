"""Operator chains, Picard iteration, traces, and the Fejer monotonicity check."""

import math

import pytest
from hypothesis import given, settings

from catprox import (
    Ball,
    DomainError,
    Halfspace,
    IterationConfig,
    IterStatus,
    OperatorChain,
    Projection,
    Resolvent,
    Segment,
    SpaceMismatch,
    SquaredDistance,
    distance,
    euclidean,
    fejer_check,
    picard,
    Point,
)

from conftest import E2, E5, assert_close, point_in


def _seg(space, a, b):
    return Segment(Point(space, a), Point(space, b))


# y = 0 and y = x as long segments through the origin; iterates stay well
# inside the endpoints so projections agree with the full lines.
X_AXIS = _seg(E2, (-64.0, 0.0), (64.0, 0.0))
DIAGONAL = _seg(E2, (-64.0, -64.0), (64.0, 64.0))


class TestChainApplication:
    def test_single_factor(self):
        chain = OperatorChain(E2, (Projection(X_AXIS),))
        out = chain.apply(Point(E2, (3.0, 1.0)))
        assert out.coords == (3.0, 0.0)

    def test_factors_apply_first_to_last(self):
        chain = OperatorChain(E2, (Projection(X_AXIS), Projection(DIAGONAL)))
        out = chain.apply(Point(E2, (3.0, 1.0)))
        assert_close(out.coords[0], 1.5)
        assert_close(out.coords[1], 1.5)

    def test_order_matters(self):
        chain = OperatorChain(E2, (Projection(DIAGONAL), Projection(X_AXIS)))
        out = chain.apply(Point(E2, (3.0, 1.0)))
        assert_close(out.coords[0], 2.0)
        assert_close(out.coords[1], 0.0)

    def test_residual_single_projection(self):
        chain = OperatorChain(E2, (Projection(Ball(Point(E2, (0.0, 0.0)), 1.0)),))
        assert_close(chain.residual(Point(E2, (2.0, 0.0))), 1.0)

    def test_residual_two_factor(self):
        chain = OperatorChain(E2, (Projection(X_AXIS), Projection(DIAGONAL)))
        r = chain.residual(Point(E2, (3.0, 1.0)))
        assert_close(r, math.sqrt(2.5))
        assert r == 1.5811388300841898

    def test_partials_per_factor(self):
        chain = OperatorChain(E2, (Projection(X_AXIS), Projection(DIAGONAL)))
        out, partials = chain.apply_with_partials(Point(E2, (3.0, 1.0)))
        assert len(partials) == 2
        assert_close(partials[0], 1.0)
        assert_close(partials[1], 3.0 / math.sqrt(2.0))
        assert_close(distance(out, Point(E2, (1.5, 1.5))), 0.0)

    def test_empty_chain_rejected(self):
        with pytest.raises(DomainError):
            OperatorChain(E2, ())

    def test_mixed_space_factor_names_index(self):
        good = Projection(Ball(Point(E2, (0.0, 0.0)), 1.0))
        bad = Projection(Ball(Point(E5, (0.0,) * 5), 1.0))
        with pytest.raises(SpaceMismatch, match="factor 1"):
            OperatorChain(E2, (good, bad))

    def test_resolvent_factor_rejects_bad_lambda(self):
        f = SquaredDistance(Point(E2, (0.0, 0.0)))
        with pytest.raises(DomainError):
            Resolvent(f, 0.0)
        with pytest.raises(DomainError):
            Resolvent(f, -2.0)


class TestPicardTwoLines:
    """Alternating projection between y = 0 and y = x from (3, 1).

    After the first sweep the iterate is (3, 3) / 2; each later sweep halves
    both coordinates, so x_n = (3, 3) * 2**-n for n >= 1 and the limit is the
    intersection point (0, 0)."""

    def run(self, **kw):
        chain = OperatorChain(E2, (Projection(X_AXIS), Projection(DIAGONAL)))
        cfg = IterationConfig(**{"max_iter": 200, "residual_tol": 1e-12,
                                 "step_tol": 1e-12, "log_every": 1, **kw})
        return picard(chain, Point(E2, (3.0, 1.0)), cfg)

    def test_matches_hand_iteration(self):
        trace = self.run()
        assert trace.status is IterStatus.CONVERGED
        for idx, pt in zip(trace.iterate_indices, trace.iterates):
            if idx == 0:
                expected = (3.0, 1.0)
            else:
                expected = (3.0 * 2.0 ** -idx, 3.0 * 2.0 ** -idx)
            assert_close(pt.coords[0], expected[0], tol=1e-12)
            assert_close(pt.coords[1], expected[1], tol=1e-12)

    def test_limit_is_intersection(self):
        trace = self.run()
        assert distance(trace.final, Point(E2, (0.0, 0.0))) < 1e-11

    def test_residual_history_shape(self):
        trace = self.run()
        assert len(trace.residuals) == trace.iterations_used + 1
        assert len(trace.per_factor_residuals) == trace.iterations_used + 1
        assert all(len(p) == 2 for p in trace.per_factor_residuals)
        assert trace.residuals[-1] <= 1e-12

    def test_subsampled_logging_keeps_endpoints(self):
        trace = self.run(log_every=10)
        assert trace.iterate_indices[0] == 0
        assert trace.iterate_indices[-1] == trace.iterations_used
        interior = trace.iterate_indices[1:-1]
        assert all(i % 10 == 0 for i in interior)
        assert len(trace.residuals) == trace.iterations_used + 1

    def test_budget_exhaustion(self):
        trace = self.run(max_iter=3)
        assert trace.status is IterStatus.MAX_ITER_REACHED
        assert trace.iterations_used == 3
        assert len(trace.residuals) == 4
        assert trace.residuals[-1] > 1e-12


class TestPicardResolvent:
    def test_geometric_halving(self):
        """lam = 1 with unit weight moves every point halfway to the anchor,
        so consecutive residuals have exact ratio one half."""
        anchor = Point(E2, (2.0, -1.0))
        chain = OperatorChain(E2, (Resolvent(SquaredDistance(anchor), 1.0),))
        cfg = IterationConfig(max_iter=200, residual_tol=1e-10,
                              step_tol=1e-10, log_every=1)
        trace = picard(chain, Point(E2, (10.0, 5.0)), cfg)
        assert trace.status is IterStatus.CONVERGED
        for a, b in zip(trace.residuals, trace.residuals[1:]):
            if b == 0.0:
                break
            assert_close(b / a, 0.5, tol=1e-9)
        assert distance(trace.final, anchor) < 1e-9

    def test_start_at_fixed_point(self):
        inside = Point(E2, (0.0, 0.0))
        chain = OperatorChain(E2, (
            Projection(Ball(inside, 1.0)),
            Projection(Halfspace(E2, (0.0, 1.0), 0.5)),
        ))
        cfg = IterationConfig(max_iter=50, residual_tol=1e-12,
                              step_tol=1e-12, log_every=1)
        trace = picard(chain, inside, cfg)
        assert trace.status is IterStatus.CONVERGED
        assert trace.iterations_used == 0
        assert trace.residuals == [0.0]
        assert trace.iterates == [inside]

    def test_zero_budget_still_converges_at_fixed_start(self):
        anchor = Point(E2, (1.0, 1.0))
        chain = OperatorChain(E2, (Resolvent(SquaredDistance(anchor), 3.0),))
        cfg = IterationConfig(max_iter=0, residual_tol=1e-12,
                              step_tol=1e-12, log_every=1)
        assert picard(chain, anchor, cfg).status is IterStatus.CONVERGED
        far = picard(chain, Point(E2, (5.0, 5.0)), cfg)
        assert far.status is IterStatus.MAX_ITER_REACHED
        assert far.iterations_used == 0

    def test_x0_space_mismatch(self):
        chain = OperatorChain(E2, (Projection(Ball(Point(E2, (0.0, 0.0)), 1.0)),))
        with pytest.raises(SpaceMismatch):
            picard(chain, Point(E5, (0.0,) * 5), IterationConfig())

    @settings(max_examples=25, deadline=None)
    @given(x0=point_in(E2))
    def test_residuals_nonincreasing_for_averaged_map(self, x0):
        anchor = Point(E2, (0.5, -0.25))
        chain = OperatorChain(E2, (Resolvent(SquaredDistance(anchor), 2.0),))
        cfg = IterationConfig(max_iter=60, residual_tol=1e-12,
                              step_tol=1e-12, log_every=1)
        trace = picard(chain, x0, cfg)
        for a, b in zip(trace.residuals, trace.residuals[1:]):
            assert b <= a + 1e-12


class TestFejerCheck:
    def make_trace(self):
        chain = OperatorChain(E2, (Projection(X_AXIS), Projection(DIAGONAL)))
        cfg = IterationConfig(max_iter=100, residual_tol=1e-12,
                              step_tol=1e-12, log_every=1)
        return picard(chain, Point(E2, (3.0, 1.0)), cfg)

    def test_passes_against_common_fixed_point(self):
        trace = self.make_trace()
        result = fejer_check(trace, Point(E2, (0.0, 0.0)))
        assert result.ok
        assert result.first_violation is None
        assert result.worst_increase <= 0.0

    def test_detects_swapped_iterates(self):
        trace = self.make_trace()
        trace.iterates[2], trace.iterates[3] = trace.iterates[3], trace.iterates[2]
        result = fejer_check(trace, Point(E2, (0.0, 0.0)))
        assert not result.ok
        # the increase happens moving from logged position 2 to 3
        assert result.first_violation == trace.iterate_indices[2]
        assert result.worst_increase > 0.0

    def test_non_fixed_reference_can_fail(self):
        """Fejer monotonicity is only promised for common fixed points; a
        generic off-limit reference sees the distance grow somewhere."""
        trace = self.make_trace()
        result = fejer_check(trace, Point(E2, (3.0, 3.0)))
        assert not result.ok


class TestTraceSerialization:
    def make_trace(self, log_every=1):
        chain = OperatorChain(E2, (Projection(X_AXIS), Projection(DIAGONAL)))
        cfg = IterationConfig(max_iter=100, residual_tol=1e-12,
                              step_tol=1e-12, log_every=log_every)
        return picard(chain, Point(E2, (3.0, 1.0)), cfg)

    def test_csv_header_and_shape(self):
        trace = self.make_trace()
        lines = trace.to_csv_text().splitlines()
        assert lines[0] == "iter,coord_0,coord_1,residual"
        assert len(lines) == 1 + len(trace.iterate_indices)

    def test_csv_cells_roundtrip_exactly(self):
        trace = self.make_trace()
        lines = trace.to_csv_text().splitlines()[1:]
        for line, idx, pt in zip(lines, trace.iterate_indices, trace.iterates):
            cells = line.split(",")
            assert int(cells[0]) == idx
            assert float(cells[1]) == pt.coords[0]
            assert float(cells[2]) == pt.coords[1]
            assert float(cells[3]) == trace.residuals[idx]

    def test_csv_uses_17_significant_digits(self):
        trace = self.make_trace()
        row = trace.to_csv_text().splitlines()[1]
        assert row.split(",")[3] == f"{trace.residuals[0]:.17g}"

    def test_json_dict_shape(self):
        trace = self.make_trace(log_every=10)
        doc = trace.to_json_dict()
        assert doc["status"] == "converged"
        assert doc["iterations_used"] == trace.iterations_used
        assert doc["config"]["log_every"] == 10
        assert len(doc["iterates"]) == len(doc["iterate_indices"])
        assert len(doc["residuals"]) == trace.iterations_used + 1
        assert doc["space"]["kind"] == "euclidean"

    def test_runs_are_bit_identical(self):
        a, b = self.make_trace(), self.make_trace()
        assert a.to_csv_text() == b.to_csv_text()
        assert a.to_json_text() == b.to_json_text()


class TestIterationConfig:
    def test_defaults(self):
        cfg = IterationConfig()
        assert cfg.max_iter == 100_000
        assert cfg.residual_tol == 1e-10
        assert cfg.step_tol == 1e-10
        assert cfg.log_every == 1

    @pytest.mark.parametrize("kw", [
        {"max_iter": -1},
        {"residual_tol": 0.0},
        {"residual_tol": -1e-6},
        {"residual_tol": math.nan},
        {"step_tol": 0.0},
        {"step_tol": math.nan},
        {"log_every": 0},
    ])
    def test_rejects_bad_values(self, kw):
        with pytest.raises(DomainError):
            IterationConfig(**kw)
