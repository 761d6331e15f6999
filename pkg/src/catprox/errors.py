"""Exception types shared across the package."""


class SpaceMismatch(ValueError):
    """Operands live in different model spaces."""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class NoConvergence(RuntimeError):
    """An iterative routine exhausted its iteration budget."""


class BadFixedPoint(ValueError):
    """A point offered as a fixed point fails the residual test."""


class ParseError(ValueError):
    """A problem document is malformed.

    ``path`` points at the offending field (e.g. ``problem.sets[1].radius``)
    so CLI users can locate the mistake without reading a stack trace.
    """

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason
