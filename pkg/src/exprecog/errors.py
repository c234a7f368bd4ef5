"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """Bad call arguments, e.g. mismatched dimensions or a zero direction."""


class InvalidInput(ValueError):
    """Data that cannot be processed (non-finite entries, malformed files)."""


class OracleDomainError(LookupError):
    """A sampled oracle was queried at a point it has no value for."""

    def __init__(self, point, message=None):
        self.point = tuple(float(v) for v in point)
        super().__init__(message or f"no sample at point {self.point}")


class DegenerateOrderError(ArithmeticError):
    """The translates of f span fewer dimensions than the requested order."""

    def __init__(self, requested, detected):
        self.requested = requested
        self.detected = detected
        super().__init__(
            f"order {requested} is degenerate: translates span only {detected} dimensions"
        )


class DegenerateRootError(ArithmeticError):
    """A characteristic root is zero, so no exponent corresponds to it."""


class HypothesisViolation(ValueError):
    """Coefficient data vanishes identically, so the Rado relation says nothing."""
