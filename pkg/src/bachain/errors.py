"""Exception types shared across the package.

Every failure mode that callers are expected to branch on gets its own
class; the CLI maps them to stable exit codes.
"""


class BachainError(Exception):
    """Base class for all package-specific errors."""


class PrecisionExhausted(BachainError):
    """Refinement hit the precision cap before the result was certified.

    Carries the cap (in bits) that was reached.
    """

    def __init__(self, message: str, precision: int):
        super().__init__(f"{message} (precision cap {precision} bits reached)")
        self.precision = precision


class DomainError(BachainError):
    """An operand is provably outside an operation's domain
    (negative radicand, zero denominator)."""


class AmbiguousRounding(BachainError):
    """Interval straddles a half-integer; the nearest integer is not
    determined.  Callers refine and retry."""


class WidthTooLarge(BachainError):
    """Interval too wide for the requested rounding operation."""


class DependenceSuspected(BachainError):
    """Evidence of a rational dependence among 1 and the form constants:
    an exact zero or an unresolvable tie between residuals.

    ``witness`` holds the integer tail(s) that produced the evidence.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ChainTooShort(BachainError):
    """The chain has too few records for the requested check."""


class HypothesisUnmet(BachainError):
    """A conditional check was invoked on a chain that does not satisfy
    its hypotheses."""


class SearchTooLarge(BachainError):
    """An exhaustive scan would exceed the configured budget."""
