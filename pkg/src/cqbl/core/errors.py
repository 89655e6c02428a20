"""Exception hierarchy for cqbl.

Each error also derives from the builtin a caller would naturally catch,
so ``except ValueError`` keeps working for code that does not know cqbl.
"""


class CqblError(Exception):
    """Base class for all cqbl errors."""


class ShapeError(CqblError, ValueError):
    """Operator or subsystem dimensions do not fit together."""


class InvalidOperatorError(CqblError, ValueError):
    """An operator violates Hermiticity, positivity, normalization or completeness."""


class SingularityError(CqblError, ArithmeticError):
    """A negative power was requested of an operator that is not strictly positive."""


class PreconditionError(CqblError, ValueError):
    """A parameter lies outside the domain where the quantity is defined."""


class InfeasibleRateError(PreconditionError):
    """The requested constraint level exceeds what any joint state achieves."""


class SizeLimitError(CqblError, ValueError):
    """A dense computation or an enumeration would exceed configured limits."""


class SpecParseError(CqblError, ValueError):
    """A channel-spec document could not be parsed into a channel."""
