"""Exception taxonomy shared by all heunkit modules.

Every domain failure raises a subclass of HeunkitError so callers (and the
CLI's exit-code mapping) can catch one base type.
"""

from __future__ import annotations


class HeunkitError(Exception):
    """Base class for all heunkit domain errors."""


class ZeroSingularity(HeunkitError):
    """The singularity location a must be nonzero."""


class NonFinite(HeunkitError):
    """A parameter or argument is NaN or infinite."""


class NegativeBase(HeunkitError):
    """Real power of a negative base with a non-integer exponent."""


class DegenerateSecondKind(HeunkitError):
    """Second-kind series with integer exponent offset 1-gamma.

    The recurrence denominators hit integer zeros and the logarithmic
    companion solution is out of scope, so this is a hard error.
    """


class SingularDenominator(HeunkitError):
    """A recurrence-coefficient denominator factor vanished.

    Carries the index n and the name of the factor that vanished.
    """

    def __init__(self, n: int, factor: str):
        self.n = n
        self.factor = factor
        super().__init__(f"denominator factor {factor} vanished at n={n}")


class SingularPoint(HeunkitError):
    """Evaluation requested at a regular singular point (0, 1, or a)."""


class PoleAtC(HeunkitError):
    """Lower hypergeometric parameter is a nonpositive integer reached
    before the series terminates."""


class NoConvergence(HeunkitError):
    """Series argument outside the convergence disk and non-terminating."""


class MaxTermsExceeded(HeunkitError):
    """Series did not reach the tolerance within the term budget."""


class DegenerateA(HeunkitError):
    """a is too close to -1: the nested-sum weights divide by (1+a).

    The correct limit is finite but numerically indeterminate in this
    form; callers should switch to the near -1 asymptotic branch.
    """


class CapsNotMonotone(HeunkitError):
    """Polynomial cap sequence must be nondecreasing."""


class InconsistentParameterization(HeunkitError):
    """Supplied exponent parameter does not match the cap sequence anchor."""


class OutsideRegion(HeunkitError):
    """Argument violates the convergence condition of a closed form."""


class OutsideMappedRegion(HeunkitError):
    """Transformed argument falls outside the mapped convergence region."""


class DivergentIntegral(HeunkitError):
    """A kernel integral has an endpoint exponent at or below -1."""


class UnsupportedDepth(HeunkitError):
    """Sub-integral nesting depth beyond the supported desk scale."""


class NonIntegerCap(HeunkitError):
    """Residue extraction needs integer caps (finite Laurent part)."""
