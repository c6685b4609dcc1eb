"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition or axiom.

    Carries an optional structured ``report`` (e.g. the list of violated
    extension-datum clauses) for callers that want more than the message.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ResourceBoundError(RuntimeError):
    """Raised when an enumeration would exceed its configured bound."""
