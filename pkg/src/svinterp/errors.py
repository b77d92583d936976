"""Exception hierarchy shared by every module."""


class SvInterpError(Exception):
    """Base class for all package errors."""


class RangeError(SvInterpError, ArithmeticError):
    """Evaluation produced a non-finite or non-positive value."""


class NonConvergent(SvInterpError):
    """An improper integral or supremum diverges.

    Parameters
    ----------
    message : str
        Human readable description.
    side : str, optional
        ``"zero"`` or ``"inf"``, the end where divergence happens.
    exponent : tuple, optional
        The offending asymptotic exponents.
    """

    def __init__(self, message, side=None, exponent=None):
        super().__init__(message)
        self.side = side
        self.exponent = exponent


class DivergentTail(NonConvergent):
    """A tail norm is infinite for every t."""


class InvalidDescriptor(SvInterpError, ValueError):
    """A space descriptor is out of range or not admissible."""


class TrivialSpace(SvInterpError):
    """The requested space reduces to the null element."""


class NonConvexIndices(SvInterpError, ValueError):
    """A norm index below one was passed to the convex oracle."""


class MaxIterations(SvInterpError):
    """The convex solver stopped before reaching tolerance."""

    def __init__(self, message, best=None, gap=None):
        super().__init__(message)
        self.best = best
        self.gap = gap


class NoRuleMatches(SvInterpError):
    """No reiteration rule covers the operand pattern."""


class HypothesisFailed(SvInterpError):
    """A rule hypothesis is violated.

    Parameters
    ----------
    condition : str
        The violated condition, written as a formula.
    """

    def __init__(self, condition, detail=""):
        msg = f"{condition} violated" + (f" ({detail})" if detail else "")
        super().__init__(msg)
        self.condition = condition
