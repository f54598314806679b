"""
Errors raised by the field-evolution kernels.

Every error knows the process exit code the management commands use when it
ends a run: 1 for arguments outside an operation's domain, 2 for numerical
failures.
"""


class FrontwavesError(Exception):
    exit_code = 2


class DomainError(FrontwavesError, ValueError):
    """An argument lies outside the domain of the requested operation."""

    exit_code = 1


class BranchCutError(DomainError):
    """A point lies exactly on a branch cut and no sheet was given."""


class ThresholdError(DomainError):
    """The frequency sits on a branch point (Ω = 0, or |ℏΩ| = mc²)."""


class CausalRegionError(DomainError):
    """Saddle data requested outside the light cone (x ≥ ct)."""


class RegimeError(FrontwavesError):
    """An asymptotic formula was asked for outside its regime."""

    exit_code = 1


class WindowError(RegimeError):
    """A near-front limit was requested far away from the front."""


class ConvergenceError(FrontwavesError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


class SheetTrackingError(ConvergenceError):
    """A contour could not be followed consistently across the sheets."""
