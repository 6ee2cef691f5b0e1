"""Exception hierarchy shared by all bertrand modules.

Division-by-zero conditions (vanishing Green function, vanishing metric
time coefficient, vanishing duality denominator) raise the builtin
``ZeroDivisionError`` rather than a custom class.
"""


class BertrandError(Exception):
    """Base class for all errors raised by this package."""


class EmptyDomainError(BertrandError):
    """No r > 0 makes the conformal factor positive and finite."""


class DomainViolationError(BertrandError):
    """A radius lies outside the validity window of the space."""


class QuadratureFailureError(BertrandError):
    """A quadrature did not reach the requested tolerance."""


class StepSizeUnderflowError(BertrandError):
    """The integrator cannot continue without leaving the radial domain."""


class NoBoundedOrbitError(BertrandError):
    """The given (E, L^2) does not bracket a bounded radial orbit."""


class DegenerateOrbitError(BertrandError):
    """Turning points coincide: the orbit is circular."""


class NotClosedWithinCapError(BertrandError):
    """No small-denominator rational matches the measured apsidal angle."""


class NoCircularOrbitError(BertrandError):
    """No L^2 >= 0 produces a circular orbit at the requested radius."""


class IllConditionedError(BertrandError):
    """A discrete operator weight underflowed or lost positivity."""


class ConvergenceFailureError(BertrandError):
    """The eigenvalue solver failed to converge."""


class LengthMismatchError(BertrandError):
    """Two spectra cannot be compared level by level."""


class UnknownPresetError(BertrandError):
    """Preset name not in the catalog."""


class InvalidOverrideError(BertrandError):
    """A preset override names a parameter the preset does not accept."""


class ParseError(BertrandError):
    """A config file is not well-formed."""


class SchemaError(BertrandError):
    """A config file contains unknown or ill-typed fields."""
