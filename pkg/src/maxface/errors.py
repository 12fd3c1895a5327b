"""Error types shared across the package.

UsageError maps to CLI exit status 3, DomainError to exit status 2.
"""


class UsageError(ValueError):
    """The caller asked for something outside the documented contract."""


class DomainError(ValueError):
    """The input data is mathematically inadmissible (coincident points,
    evaluation at a pole, singular Jacobian, ...)."""
