"""Exception types shared across the library.

The command line maps these onto distinct exit codes, so solver and
operator code should raise them rather than bare RuntimeError.
"""


class DimensionError(ValueError):
    """A matrix or block had a different shape than the receiver expects."""


class NumericError(RuntimeError):
    """An iteration produced non-finite values or an ill-posed subproblem."""
