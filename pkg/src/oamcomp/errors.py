"""Exception hierarchy shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition or format contract."""


class LeakageError(ValidationError):
    """Amplitude found outside the computational subspace.

    Carries the offending ``(mode, l)`` pairs so callers can report them.
    """

    def __init__(self, offenders, message=None):
        self.offenders = list(offenders)
        if message is None:
            message = f"amplitude outside computational range at {self.offenders}"
        super().__init__(message)
