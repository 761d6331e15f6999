"""Bounded 1-D minimization by golden-section search.

Used for segment projections and as the numeric prox oracle.  The objective
only needs to be unimodal (convex objectives along geodesics qualify);
values of +inf are allowed and compare correctly.
"""

import math

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section(fn, lo: float = 0.0, hi: float = 1.0,
                   tol: float = 1e-14, max_iter: int = 200) -> float:
    """Return the best evaluated point of ``fn`` on ``[lo, hi]``.

    The bracket contracts by the golden ratio each step; the 200-iteration
    cap resolves the argument far below ``tol`` for any practical bracket.
    The result is the argmin over every point actually probed (endpoints
    included), never an unevaluated bracket midpoint: when the objective
    jumps to +inf at a boundary the bracket center can land on the infinite
    side even though finite probes were seen arbitrarily close by.
    """
    a, b = float(lo), float(hi)
    best_f, best_t = min((fn(a), a), (fn(b), b))
    h = b - a
    if h <= tol:
        return best_t
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    fc = fn(c)
    fd = fn(d)
    for _ in range(max_iter):
        if fc < best_f:
            best_f, best_t = fc, c
        if fd < best_f:
            best_f, best_t = fd, d
        if h <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INVPHI2 * h
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INVPHI * h
            fd = fn(d)
    return best_t
