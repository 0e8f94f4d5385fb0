from circle.exceptions import CircleMaxError


class MeasureError(CircleMaxError):
    """Errors raised while bounding the maximal invariant-measure integral."""


class LPInfeasible(MeasureError):
    """The Ulam program has no optimum; a transition graph without cycles is a bug."""


class BranchExplosion(MeasureError):
    """f^p has more pieces than the configured cap allows."""
