"""Exception types raised across the package."""

from __future__ import annotations


class RotaError(Exception):
    """Base class for all package errors."""


class NonPrimeModulus(RotaError, ValueError):
    pass


class ZeroInverse(RotaError, ZeroDivisionError):
    pass


class UnsupportedInExactIntegerMode(RotaError):
    pass


class DimensionMismatch(RotaError, ValueError):
    pass


class EmptyList(RotaError, ValueError):
    pass


class BadSplitPoint(RotaError, ValueError):
    pass


class BudgetExceeded(RotaError):
    """Some explicit work budget ran out before an exact answer was reached."""


class TooLarge(BudgetExceeded):
    pass


class RejectionBudgetExceeded(BudgetExceeded):
    def __init__(self, attempts: int, accepted: int = 0, message: str | None = None):
        self.attempts = attempts
        self.accepted = accepted
        self.acceptance_rate = accepted / attempts if attempts else 0.0
        super().__init__(
            message
            or f"rejection sampler gave up after {attempts} attempts "
            f"(observed acceptance rate {self.acceptance_rate:.3g})"
        )


class TailDiverges(RotaError):
    pass
