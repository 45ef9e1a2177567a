"""Exception types raised across the package.

Every guarded precondition has its own class so callers (and the CLI) can
map failures to exit semantics without string matching.
"""


class RankMetricError(Exception):
    """Base class for all package errors."""


# -- field construction and arithmetic ------------------------------------

class NonPrime(RankMetricError):
    """Characteristic p is not prime."""


class ReducibleModulus(RankMetricError):
    """Supplied modulus polynomial is reducible over GF(p)."""


class DegreeMismatch(RankMetricError):
    """Supplied modulus does not have the required monic degree."""


class TooLargeField(RankMetricError):
    """Field order beyond desk scale; tables are not built."""


class ZeroInverse(RankMetricError):
    """Multiplicative inverse of zero requested."""


class ContextMismatch(RankMetricError):
    """Operands belong to different field contexts."""


class NonDivisorDegree(RankMetricError):
    """Subfield degree does not divide the extension degree."""


# -- codes ------------------------------------------------------------------

class BadParams(RankMetricError):
    """Construction parameters violate a definition precondition."""


class TooLarge(RankMetricError):
    """Enumeration would exceed the guarded size."""


class NonIntegralK(RankMetricError):
    """Code dimension is not a multiple of n."""


class DependentAnchors(RankMetricError):
    """Export anchors are GF(q)-linearly dependent."""


class SingularMap(RankMetricError):
    """Inverse of a singular linearized polynomial requested."""


# -- equivalence ------------------------------------------------------------

class BadWitnessShape(RankMetricError):
    """Independent-support witness map is malformed."""


class OutOfTheoremRange(RankMetricError):
    """Classification predicate called outside 2 <= k <= n-2."""


class BudgetExceeded(RankMetricError):
    """Exhaustive search space exceeds the allowed budget."""


class SingularWitness(RankMetricError):
    """Equivalence witness with a singular side."""


# -- CLI ----------------------------------------------------------------------

class ParseError(RankMetricError):
    """Malformed spec line."""


class ConstraintError(RankMetricError):
    """Well-formed spec violating a documented precondition."""
