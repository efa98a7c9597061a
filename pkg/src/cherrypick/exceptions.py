"""Exception hierarchy shared by every module."""


class CherryPickError(ValueError):
    """Base class for all errors raised by :mod:`cherrypick`."""


class DomainError(CherryPickError):
    """An argument lies outside the domain of the operation."""


class DegenerateInputError(DomainError):
    """The data cannot support the statistic (too few values, zero variance)."""


class ParseError(DomainError):
    """A data or config file could not be parsed.

    ``row`` is the 1-based line number of the offending record when known.
    """

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row
