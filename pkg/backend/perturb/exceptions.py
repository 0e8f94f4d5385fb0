from circle.exceptions import CircleMaxError


class PerturbError(CircleMaxError):
    """Errors raised while constructing the closing perturbation."""


class DegenerateGeometry(PerturbError):
    """A point the construction must move sits on the boundary of its support."""


class EmptyPreimageSet(PerturbError):
    """No iterated preimage of q₀ reaches the c̄ average within tolerance."""


class DeltaCollapse(PerturbError):
    """The separation radius δ shrank below the grid spacing."""


class NoValidAlpha(PerturbError):
    """No grid point of W₀ satisfies the α inequality."""


class SupportOverflow(PerturbError):
    """The tube V(L) does not fit inside I at grid resolution."""


class FlatP(PerturbError):
    """ψ is flat near α, so the expansion schedule is the identity."""


class MonotonicityBreak(PerturbError):
    """The radius map of T₂ is not strictly increasing."""


class PeriodicityLost(PerturbError):
    """Composition rounding broke the closed orbit."""


class ConstructionFailed(PerturbError):
    """Every retry of the construction ended in a recoverable error."""
