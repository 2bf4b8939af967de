"""Exception hierarchy for the spinrelax package."""


class SpinRelaxError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SpinRelaxError, ValueError):
    """An input lies outside the documented domain of an operation."""


class DegeneracyError(SpinRelaxError):
    """Eigenstate labeling is ambiguous because two levels are degenerate."""


class MaskedFieldError(SpinRelaxError):
    """A field value falls inside an exclusion window and masking is active."""


class ConfigurationError(SpinRelaxError):
    """A simulation configuration is internally inconsistent."""


class InsufficientDataError(SpinRelaxError):
    """Too few usable data points for the requested operation."""


class IdentifiabilityError(SpinRelaxError):
    """The requested free parameters cannot be distinguished by the data.

    The offending parameter names are available as ``parameters``.
    """

    def __init__(self, message, parameters=()):
        super().__init__(message)
        self.parameters = tuple(parameters)


class ParseError(SpinRelaxError, ValueError):
    """A data file is malformed. Carries the 1-based line number as ``line``."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
