"""Exception hierarchy shared across the package.

Library code raises these; the command line maps them onto process exit
codes (config problems -> 3, mathematical invariant violations -> 2).
"""


class CarrollianError(Exception):
    """Base class for all package errors."""


class ParameterError(CarrollianError, ValueError):
    """A scalar parameter is outside its documented range (c0 <= 0, delta <= 0, ...)."""


class DomainError(CarrollianError, ValueError):
    """State evaluated where the flux is undefined (on or beyond beta = +/-sigma)."""


class AdmissibilityError(CarrollianError, ValueError):
    """A test function pair violates its admissibility conditions."""


class InvariantViolationError(CarrollianError, RuntimeError):
    """A solver state left the invariant region sigma - |beta| >= c0."""

    def __init__(self, message, t=None, cell=None, value=None):
        super().__init__(message)
        self.t = t
        self.cell = cell
        self.value = value


class ConfigError(CarrollianError, ValueError):
    """Malformed or inconsistent run configuration."""


class QuadratureError(CarrollianError, RuntimeError):
    """Adaptive quadrature failed to converge on some interval."""


class InputError(CarrollianError, ValueError):
    """Analysis input violates a precondition (support, sign, certification)."""
