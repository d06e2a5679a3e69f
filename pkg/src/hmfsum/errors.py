"""Exception hierarchy shared by all modules.

The CLI maps :class:`HypothesisError` (and its subclasses) to exit status 2
and :class:`ConvergenceError` to exit status 1.
"""


class HmfsumError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HmfsumError, ValueError):
    """An argument lies outside the domain of a function."""


class PoleError(DomainError):
    """A function was evaluated at one of its poles."""


class HypothesisError(HmfsumError, ValueError):
    """A mathematical hypothesis of a summation formula is violated."""


class IngestionError(HypothesisError):
    """A coefficient file is malformed or internally inconsistent."""


class ConvergenceError(HmfsumError, ArithmeticError):
    """A series, recurrence or quadrature failed to reach its tolerance."""


class DecayError(ConvergenceError):
    """An integrand on a vertical line decays slower than declared."""


class TruncationError(ConvergenceError):
    """The truncation cap was hit before the tail bound met its target.

    The partially converged report (if any) is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
