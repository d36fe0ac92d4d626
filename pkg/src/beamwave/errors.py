"""Exception hierarchy shared by all solver modules."""


class BeamwaveError(Exception):
    """Base class for every error raised by this package."""


class InvalidGrid(BeamwaveError):
    pass


class InvalidOrder(BeamwaveError):
    pass


class InvalidArgument(BeamwaveError, ValueError):
    pass


class SymbolNotPositive(BeamwaveError, ValueError):
    """Raised when c >= sqrt(2), where the beam symbol stops being positive."""


class UnsupportedForFamily(BeamwaveError):
    pass


class NoConvergence(BeamwaveError):
    pass


class TrivialSolution(BeamwaveError):
    pass


class HomotopyBroken(BeamwaveError):
    """A homotopy stage failed.

    Attributes
    ----------
    stage : int
        Index of the failing stage in the plan.
    last_good : dict
        Equation parameters of the last converged profile, or ``None``.
    """

    def __init__(self, message, stage, last_good=None):
        super().__init__(message)
        self.stage = stage
        self.last_good = last_good


class StepFailure(BeamwaveError):
    pass


class NoTransitionInRange(BeamwaveError):
    pass


class FredholmViolation(BeamwaveError):
    pass


class DegenerateKernel(BeamwaveError):
    pass


class EigenFailure(BeamwaveError):
    pass


class IndexMismatch(BeamwaveError):
    pass


class StageNonConvergence(BeamwaveError):
    pass


class WindowBelowFloor(BeamwaveError):
    pass


class InsufficientTail(BeamwaveError):
    pass


class ConfigError(BeamwaveError, ValueError):
    pass
