"""Exception hierarchy shared by every module of the package."""


class RelayICError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateChannel(RelayICError):
    """A direct gain is zero where a ratio by it is required."""


class SingularModel(RelayICError):
    """A mutual information or conditional variance is not finite."""


class InvalidR0(RelayICError):
    """The relay rate is negative, or zero where a positive rate is needed."""


class WynerZivInfeasible(RelayICError):
    """The relay rate cannot carry the quantized observation to a receiver."""


class RegimeViolation(RelayICError):
    """The channel lies outside the regime a bound was derived for."""


class EmptyRegion(RelayICError):
    """A rate polytope has no feasible nonnegative point."""


class DomainError(RelayICError):
    """An asymptotic exponent lies outside its admissible interval."""


class DimensionMismatch(RelayICError):
    """Matrix shapes of a deterministic scheme do not fit its channel."""


class SearchBudgetExceeded(RelayICError):
    """An exhaustive search would exceed its configured budget."""
