"""Exception types raised by the decision procedures."""


class TrickError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TrickError, ValueError):
    """A value lies outside the domain an operation is defined on."""


class SpecError(TrickError, ValueError):
    """A textual or JSON specification could not be parsed."""


class MonotonicityViolation(TrickError):
    """A bit oracle that must be increasing was observed to drop from 1 to 0."""

    def __init__(self, one_at: int, zero_at: int):
        super().__init__(f"bit {one_at} is 1 but later bit {zero_at} is 0")
        self.one_at = one_at
        self.zero_at = zero_at


class PrecisionExhausted(TrickError):
    """An interval real did not narrow enough before the precision cap."""


class BudgetExceeded(TrickError):
    """A search passed its configured depth or size cap."""


class InvalidWitness(TrickError):
    """A supplied non-uniformity witness does not check out on evaluation."""


class InconsistentModulus(TrickError):
    """A branch was reached that a valid pointwise modulus rules out.

    Raised when the modulus is demonstrably wrong but no replayable
    refutation could be assembled inside the observation budget.
    """
