from circle.exceptions import CircleMaxError


class BirkhoffError(CircleMaxError):
    """Errors raised by the Birkhoff-sum and recurrence scans."""


class NotFound(BirkhoffError):
    """A bounded search ended without a witness at the given resolution."""


class EmptyReturnSet(BirkhoffError):
    """No grid point of the ball returns to it within the searched times."""
