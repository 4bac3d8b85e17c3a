"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: validation problems exit 1, numerical
failures exit 2, I/O failures (plain ``OSError``) exit 3.
"""


class LapdmdError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(LapdmdError, ValueError):
    """Bad user input: parameters, shapes, or configuration."""


class NumericalError(LapdmdError, RuntimeError):
    """A computation failed or produced non-finite values."""


class GramRankError(NumericalError):
    """Kernel Gram matrix carries no usable rank for fitting."""


class IntegrationError(NumericalError):
    """Time integration produced a non-finite state."""


class StabilityError(IntegrationError):
    """PDE step went unstable; carries a suggested sub-step count."""

    def __init__(self, message, suggested_substeps=None):
        super().__init__(message)
        self.suggested_substeps = suggested_substeps
