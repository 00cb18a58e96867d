"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematically allowed domain."""


class ValidationError(ValueError):
    """A parameter set or configuration violates a documented invariant."""


class ParseError(ValueError):
    """A configuration file could not be parsed."""


class QuadratureError(RuntimeError):
    """A numerical integral could not be evaluated to the requested tolerance."""


class ConvergenceError(QuadratureError):
    """Adaptive refinement hit its depth limit with the error estimate still too large."""

    def __init__(self, message, worst_interval=None, err_estimate=None):
        super().__init__(message)
        self.worst_interval = worst_interval
        self.err_estimate = err_estimate


class ReconstructionError(RuntimeError):
    """Field-statistics reconstruction is outside its validity regime."""


class ValidityWarning(UserWarning):
    """Result returned as-is, but a perturbative validity condition is strained."""
