"""Error taxonomy shared across the library.

DomainError covers invalid arguments (bad parameter ranges, malformed
segment lists, mismatched lengths).  PreconditionError marks calls whose
mathematical hypothesis fails for the given model, e.g. asking for the
worst-case pre-log lower bound of a process with positive mass at zero.
NumericError marks internal numerical failures (eigensolver stagnation,
covariance matrices that are not numerically positive semidefinite).
"""


class DomainError(ValueError):
    """Invalid argument value or malformed input object."""


class PreconditionError(DomainError):
    """The operation's mathematical hypothesis does not hold for this input."""


class NumericError(ArithmeticError):
    """A numerical routine failed to converge or produced unusable output."""
