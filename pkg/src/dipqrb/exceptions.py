"""Custom exceptions."""


class BeaconError(Exception):
    """Base exception for DIPQRB."""

    pass


class ValidationError(BeaconError):
    """Input outside its allowed domain."""

    pass


class UndefinedConditioningError(BeaconError):
    """A conditioning event has probability zero."""

    pass


class NoSignallingError(BeaconError):
    """Behavior marginals depend on a remote input."""

    pass


class MomentNotFoundError(BeaconError):
    """A functional references a moment outside the generated index.

    Usually means the relaxation level is too low for the constraint.
    """

    def __init__(self, message: str, moment: object | None = None):
        super().__init__(message)
        self.moment = moment


class SolverError(BeaconError):
    """The SDP solver did not return a usable solution."""

    def __init__(self, message: str, status: str | None = None):
        super().__init__(message)
        self.status = status


class InfeasibleAcceptedSetError(BeaconError):
    """No distribution satisfies the accepted-set intervals."""

    pass


class AbortedTranscriptError(BeaconError):
    """Operation requires a completed transcript."""

    pass


class FrameError(BeaconError):
    """Malformed or unsupported wire frame."""

    def __init__(self, message: str, code: str = "malformed"):
        super().__init__(message)
        self.code = code


class TransportError(BeaconError):
    """Connection failed or dropped mid-session."""

    pass
