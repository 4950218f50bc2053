"""Shared error and warning types.

Every raise in this package goes through one of these classes so callers can
tell apart bad inputs, unsupported parameter combinations, hard capability
limits, and numerical failures.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class UnsupportedParameterError(ValueError):
    """Arguments are individually valid but the combination has no
    implemented evaluation path."""


class CapabilityError(ValueError):
    """The requested problem size exceeds the validated envelope."""


class ConvergenceError(RuntimeError):
    """A series or quadrature hit its iteration cap before reaching the
    requested tolerance."""


class NumericalConsistencyError(RuntimeError):
    """Quantities that must agree analytically disagree beyond tolerance."""


class AfdUndefinedError(ZeroDivisionError):
    """Average fade duration is undefined because the crossing rate is zero."""


class PrecisionWarning(UserWarning):
    """The result was returned, but its estimated accuracy is degraded
    (clamping beyond tolerance, ill-conditioned determinant, or a
    near-degenerate correlation routed to a limiting branch)."""
