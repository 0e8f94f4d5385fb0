"""
circlemax 예외 계층
Why: 모든 앱의 예외가 CircleMaxError 하나로 잡히도록 루트 클래스를 여기 둔다
"""


class CircleMaxError(Exception):
    """Root of every error raised by the circlemax apps."""


class CircleError(CircleMaxError):
    """Errors raised while building or evaluating circle objects."""


class InvalidMap(CircleError, ValueError):
    """Breakpoint/lift tables that do not describe a continuous circle map."""


class InvalidPotential(CircleError, ValueError):
    """Samples that violate the declared Lipschitz bound."""


class InvalidArc(CircleError, ValueError):
    pass


class NotMonotone(CircleError, ValueError):
    """Knot table of a local homeomorphism that is not strictly increasing."""


class ZeroSlopePiece(CircleError):
    """A constant piece makes the preimage set of some point infinite."""


class ResolutionTooCoarse(CircleError):
    """Sample spacing too coarse to certify the requested closeness."""
