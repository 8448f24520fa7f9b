"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: precondition problems exit 3,
budget overruns exit 4.
"""


class DalError(Exception):
    """Base class for all library errors."""


class PreconditionError(DalError, ValueError):
    """An operation was called with arguments outside its contract."""


class SpecError(PreconditionError):
    """A real-number description is malformed."""


class RefineNeeded(DalError, ArithmeticError):
    """The enclosure is too wide to decide; re-evaluate with more bits."""


class PrecisionExhausted(DalError, ArithmeticError):
    """Refinement did not converge within the precision cap."""


class DegenerateHit(DalError):
    """An exact zero approximation error was met (xi^j rational for all j <= n)."""

    def __init__(self, message, q=None, coeffs=None):
        super().__init__(message)
        self.q = q
        self.coeffs = coeffs


class AlgebraicHit(DalError):
    """An integer polynomial vanishes exactly at xi."""

    def __init__(self, message, coeffs=None):
        super().__init__(message)
        self.coeffs = coeffs


class TooFewRecords(PreconditionError):
    pass


class BudgetExceeded(DalError):
    """An enumeration hit its lattice-point budget."""

    def __init__(self, message, searched=None):
        super().__init__(message)
        self.searched = searched
