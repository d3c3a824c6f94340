"""Exception types raised by the planning library."""


class AUVMSError(Exception):
    """Base class for every error raised by this package."""


class SingularPitch(AUVMSError):
    """Euler pitch at +-pi/2 (gimbal lock); the rate transform is undefined there."""


PitchSingular = SingularPitch


class OutOfRange(AUVMSError):
    """A bounded joint sits on or beyond one of its limits."""


class SingularJacobian(AUVMSError):
    """The weighted 6x6 core J W^-1 J^T is numerically singular."""


class InvalidScenario(AUVMSError):
    """Scenario failed validation (bad field, start in collision, ...)."""

    def __init__(self, message, source=None, line=None):
        self.source = source
        self.line = line
        where = ""
        if source is not None:
            where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


class InvalidPath(AUVMSError):
    """A path handed to post-processing has a colliding consecutive edge."""


class DegeneratePath(AUVMSError):
    """Path has no workspace length to parameterize in time."""
