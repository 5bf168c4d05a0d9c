"""Exception hierarchy shared by every duomode module."""


class DuomodeError(Exception):
    """Base class for all duomode errors."""


class InstabilityError(DuomodeError):
    """Parameters lie outside the stable domain, kappa^2 + lambda^2 - g^2 <= 0."""


class UnphysicalReservoirError(DuomodeError, ValueError):
    """Reservoir correlation m exceeds sqrt(n(n+1)) or a value is negative."""


class InvalidParameterError(DuomodeError, ValueError):
    pass


class DegeneratePopulationError(DuomodeError):
    """Normalised degrees requested while a mode population is zero."""


class SingularSystemError(DuomodeError):
    pass


class StepSizeError(DuomodeError, ValueError):
    pass


class FactorizationError(DuomodeError):
    pass


class DivergenceError(DuomodeError):
    pass
