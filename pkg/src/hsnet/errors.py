"""Exception types shared across the package.

Validation failures map to CLI exit code 2, numerical failures to 3.
"""


class ValidationError(ValueError):
    """Raised when input files, records, or configs violate the schema."""


class NumericalError(RuntimeError):
    """Raised when a computation produces non-finite values."""
