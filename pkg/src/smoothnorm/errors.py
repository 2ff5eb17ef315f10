"""Error taxonomy shared across the package.

Three failure classes: bad arguments, numerical non-convergence, and
constructions whose validity checks fail on instantiated data.
"""


class ParameterError(ValueError):
    """Raised when an argument violates a documented precondition."""


class NumericError(RuntimeError):
    """Raised when an iterative routine exhausts its budget.

    Carries the last bracket so callers can inspect how far the
    computation got.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class ConstructionError(RuntimeError):
    """Raised when a constructed instance fails its own validity checks."""
