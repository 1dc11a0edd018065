class QuantLabError(ValueError):
    """Base class for every error raised by the laboratory."""


class UnsupportedOperation(QuantLabError):
    """The operation is not defined for this measure, dimension or method."""


class DomainError(QuantLabError):
    """An argument lies outside the domain of the operation."""


class InvalidQuantizer(QuantLabError):
    """The grid is not an element of F_K (duplicates, non-finite or unsorted)."""


class SizeLimitError(QuantLabError):
    """The request exceeds a hard size limit of an exact algorithm."""


class NotApplicable(QuantLabError):
    """The hypotheses of a bound are not satisfied by the given parameters."""


class ConfigError(QuantLabError):
    """A configuration document or distribution spec could not be parsed."""
