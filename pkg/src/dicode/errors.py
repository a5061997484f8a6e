"""Shared exception types.

Kept in one place so the CLI can map them onto exit codes without
importing half the package.
"""


class InfeasibleError(ValueError):
    """No parameter choice satisfies the requested constraints."""


class DegenerateFadingError(ValueError):
    """The fading law puts too much mass at zero for the requested outage level."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested relative accuracy."""


class ValidationFailure(RuntimeError):
    """A statistical validation run found deviations beyond tolerance."""
