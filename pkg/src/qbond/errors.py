"""Package exceptions.

The CLI maps these onto exit codes: ValidationError -> 2, NumericalError -> 3.
"""


class ValidationError(ValueError):
    """Input fails a structural or physical precondition."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or lost required precision."""
