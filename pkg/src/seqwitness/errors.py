"""Exception types raised across the package."""


class NonUnitTrace(ValueError):
    """Density operator whose trace differs from one."""


class NotHermitian(ValueError):
    """Matrix that fails the Hermiticity check."""


class InvalidParams(ValueError):
    """Protocol parameters outside their admissible window."""


class InvalidSharpness(ValueError):
    """Measurement sharpness outside (0, 1]."""


class InternalInconsistency(RuntimeError):
    """Two independent computation paths disagree."""


class NotFound(LookupError):
    """Search that failed to produce a witness value."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
