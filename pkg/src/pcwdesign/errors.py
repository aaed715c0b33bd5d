"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`PCWError`.
The CLI maps the families onto exit codes: validation (2), infeasible
geometry (3), non-convergence (4).
"""

from __future__ import annotations


class PCWError(Exception):
    """Base class for package errors."""


class DomainError(PCWError, ValueError):
    """An argument lies outside the domain of an operation."""


class ExtrapolationError(DomainError):
    """A material table was queried outside its sampled wavelength range."""


class QuadratureError(PCWError, ArithmeticError):
    """Adaptive quadrature hit its subdivision limit.

    ``estimate`` and ``error`` carry the best result reached.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(PCWError, ValueError):
    """The supplied interval does not bracket a sign change."""


class ConvergenceError(PCWError, ArithmeticError):
    """An iteration exhausted its budget. ``trace`` holds the iterates."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class DivergenceError(ConvergenceError):
    """An iterate left the admissible region or became non-finite."""


class InfeasibleDesignError(PCWError):
    """The heuristic model has no solution for the requested inputs.

    ``quantity`` names the violated bound (e.g. ``"r"``, ``"theta_wg"``).
    """

    def __init__(self, message: str, quantity: str | None = None, trace=None):
        super().__init__(message)
        self.quantity = quantity
        self.trace = trace


class GeometryError(InfeasibleDesignError):
    """Lattice geometry is degenerate (closed slit, overlapping holes, pole)."""
