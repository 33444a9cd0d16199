"""Exception and warning types raised by optosnr."""


class OptoSNRError(Exception):
    """Base class for all optosnr errors."""


class DomainError(OptoSNRError, ValueError):
    """An argument lies outside the domain of a physical formula."""


class ConfigurationError(OptoSNRError, ValueError):
    """Parameters, grids or plans violate a documented invariant."""


class StabilityError(OptoSNRError, ArithmeticError):
    """A drift matrix is not Hurwitz where a steady state is required."""


class DegenerateObjectiveError(OptoSNRError, ArithmeticError):
    """The optimization objective is flat over the requested bracket."""


class CoolingTimeWarning(UserWarning):
    """Cooling interval is short compared with the feedback relaxation time."""


class ArrivalTimeWarning(UserWarning):
    """The force arrives mostly outside the measurement window."""
