"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class RegimeError(ValueError):
    """Asymptotic formula requested outside its validity regime."""


class CoverageError(KeyError):
    """Eigenvalue table does not cover a requested prime."""

    def __init__(self, prime):
        super().__init__(f"no Hecke eigenvalue for prime {prime}")
        self.prime = prime


class ConsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagree."""


class BudgetError(RuntimeError):
    """Numerical tolerance not reached within the work budget.

    Carries the best available estimate and its error bound.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class CertificateRefused(RuntimeError):
    """Sampled derivative data contradict the declared phase descriptors."""


class NoStationaryPoint(ValueError):
    pass


class AmbiguousStationaryPoint(ValueError):
    pass


class DegeneratePhase(ValueError):
    """Second derivative at the stationary point is too small to expand."""


class TruncationError(RuntimeError):
    """A truncated series could not be certified to the requested accuracy."""
