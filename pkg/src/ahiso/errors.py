"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`AhisoError`,
which the CLI maps to exit status 1.
"""


class AhisoError(Exception):
    """Base class for domain and numerical failures."""


# numerical kernel


class BudgetExhausted(AhisoError):
    pass


class NonFiniteValue(AhisoError):
    pass


class DivergenceDetected(AhisoError):
    pass


class StepUnderflow(AhisoError):
    pass


class NoSignChange(AhisoError):
    pass


class InsufficientData(AhisoError):
    pass


class NonPositiveData(AhisoError):
    pass


# geometry


class InvalidParameter(AhisoError, ValueError):
    pass


class OutOfDomain(AhisoError, ValueError):
    pass


class NoHorizon(AhisoError):
    pass


class HorizonConditionViolated(AhisoError):
    pass


class MatchingFailed(AhisoError):
    pass


class InfeasibleParameters(AhisoError):
    pass


class PositivityFailed(AhisoError):
    pass


class HypothesisViolated(AhisoError):
    pass


class IntegrandNonpositive(AhisoError):
    pass


class InversionFailure(AhisoError):
    pass
