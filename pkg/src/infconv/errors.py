"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`InfConvError`, so callers (the CLI in particular) can separate
expected domain failures from programming errors.
"""


class InfConvError(Exception):
    """Base class for all library errors."""


class InvalidGrid(InfConvError, ValueError):
    pass


class GridTooLarge(InfConvError, ValueError):
    pass


class DegenerateFunction(InfConvError, ValueError):
    """Raised when a grid function has no finite sample."""


class InvalidSample(InfConvError, ValueError):
    """NaN or negative infinity in a sample array."""


class GridMismatch(InfConvError, ValueError):
    pass


class EmptyFold(InfConvError, ValueError):
    pass


class OracleTooLarge(InfConvError, ValueError):
    """The exhaustive m-fold oracle would enumerate too many tuples."""


class NotConvex(InfConvError, ValueError):
    pass


class IdentityNotApplicable(InfConvError, ValueError):
    pass


class IndeterminatePsi(InfConvError, ArithmeticError):
    pass


class EmptyDomain(InfConvError, ValueError):
    """No sampled exponent has a finite generating-function value."""


class NotAFactorization(InfConvError, ValueError):
    pass


class OutsideSupremumDomain(InfConvError, ValueError):
    """Sum of component norms is zero or infinite."""


class HypothesisViolated(InfConvError, ValueError):
    pass


class SpecParseError(InfConvError, ValueError):
    """Malformed textual function or generating-function descriptor."""
