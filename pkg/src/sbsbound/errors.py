"""Exception types raised across the package."""


class ValidationError(ValueError):
    """An input violates a structural requirement (Hermiticity, trace, PSD...)."""


class ShapeError(ValidationError):
    """Operand dimensions do not match."""


class ArityError(ValidationError):
    """A measurement has fewer outcomes than the ensemble has members."""


class DimensionLimitError(ValueError):
    """A full-space construction would exceed the configured dimension cap."""

    def __init__(self, dim, cap, what="operator"):
        self.dim = dim
        self.cap = cap
        super().__init__(f"{what} dimension {dim} exceeds cap {cap}")


class DegeneracyError(ValueError):
    """Vectors fed to Gram-Schmidt are (numerically) linearly dependent.

    ``index`` is the 0-based position of the first vector found to lie in the
    span of its predecessors. ``environment`` and ``time`` are filled in by the
    dynamics layer when the vectors are evolved branch states.
    """

    def __init__(self, index, message=None, environment=None, time=None):
        self.index = index
        self.environment = environment
        self.time = time
        if message is None:
            message = f"vector {index} is linearly dependent on its predecessors"
        if environment is not None:
            message += f" (environment {environment}"
            message += f", t={time!r})" if time is not None else ")"
        super().__init__(message)


class CapabilityError(ValueError):
    """The operation needs data the object does not carry (e.g. Kraus operators)."""


class PreconditionError(ValueError):
    """A documented precondition of an operation is not met."""


class BoundViolationError(AssertionError):
    """A proven inequality failed numerically; indicates a bug, never expected."""
