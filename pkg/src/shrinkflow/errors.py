"""Domain errors. Messages reuse the wording callers/tests key on."""


class ShrinkFlowError(Exception):
    """Base class for all domain errors raised by this package."""


class DegenerateCurveError(ShrinkFlowError):
    pass


class IllResolvedTurningError(ShrinkFlowError):
    pass


class NotAShrinkerError(ShrinkFlowError):
    pass


class SubcriticalEnergyError(ShrinkFlowError):
    pass


class NoSuchShrinkerError(ShrinkFlowError):
    pass


class ShootingError(ShrinkFlowError):
    pass


class ProfileClosureError(ShrinkFlowError):
    pass


class ResolutionLostError(ShrinkFlowError):
    pass


class InconclusiveFitError(ShrinkFlowError):
    pass


class NotEntropyUnstableError(ShrinkFlowError):
    pass


class PerturbationFailedError(ShrinkFlowError):
    def __init__(self, message, landscape=None):
        super().__init__(message)
        self.landscape = landscape or []
