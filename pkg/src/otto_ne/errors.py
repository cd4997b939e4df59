"""Exception hierarchy shared by all modules."""


class OttoError(Exception):
    """Base class for physics and numerics failures (CLI exit code 3)."""


class DomainError(OttoError, ValueError):
    pass


class NonphysicalOccupation(OttoError):
    pass


class DegenerateCycle(OttoError):
    pass


class UseClosedForm(OttoError):
    """Raised when a protocol with a symbolic Q* is handed to the integrator."""


class IntegrationFailure(OttoError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoInteriorMaximum(OttoError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class TruncationError(OttoError):
    pass
