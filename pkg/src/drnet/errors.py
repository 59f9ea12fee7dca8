"""Exception types shared across the package.

DataError subclasses signal problems with user-supplied inputs (files,
dimensions, arguments); everything else is treated as internal.
"""


class DrnetError(Exception):
    pass


class DataError(DrnetError):
    """Base for errors caused by bad inputs rather than bugs."""


class DimensionError(DataError, ValueError):
    """Matrix or vector shapes do not conform."""


class ValidationError(DataError, ValueError):
    """Invalid argument or malformed data content."""


class ParseError(DataError):
    """A document or file could not be parsed.

    ``location`` is a human-readable hint (path, line, or field).
    """

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)


class UnsupportedVersionError(ParseError):
    """Document carries a version this build does not read."""


class TermBudgetError(DataError):
    """Symbolic expansion exceeded its configured term budget."""


class GenerationError(DataError):
    """Concept generation exhausted its retry budget."""


class DegenerateModelError(DataError):
    """Training kept producing single-class predictors.

    Carries the last trained network and the number of attempts made.
    """

    def __init__(self, message, net=None, attempts=0):
        super().__init__(message)
        self.net = net
        self.attempts = attempts
