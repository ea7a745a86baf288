"""Exception hierarchy shared by all mginf modules."""


class MginfError(Exception):
    """Base class for all mginf errors."""


class NonPositiveParameter(MginfError):
    pass


class NonFiniteParameter(MginfError):
    pass


class BetaOutOfRange(MginfError):
    pass


class EmptyTable(MginfError):
    pass


class NonPositiveTime(MginfError):
    pass


class NegativeTime(MginfError):
    pass


class ProbabilityOutOfRange(MginfError):
    pass


class DegenerateDistribution(MginfError):
    pass


class DivergentKernelIntegral(MginfError):
    pass


class StepMismatch(MginfError):
    pass


class NegativeS(MginfError):
    pass


class QuadratureFailure(MginfError):
    pass


class StepTooCoarse(MginfError):
    pass


class TruncationBudgetExceeded(MginfError):
    pass


class EmptySample(MginfError):
    pass
