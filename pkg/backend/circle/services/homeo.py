"""
호 위에 지지된 국소 위상동형사상 T, T₁, T₂
Why: 섭동은 모두 "호 밖에서는 항등, 호 안에서는 증가 PL 전단사" 형태라 하나의 타입으로 충분하다
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..exceptions import NotMonotone
from .geometry import ArrayLike, Arc, wrap
from .pl_map import PLMap


@dataclass(frozen=True, eq=False)
class LocalHomeo:
    """
    support: the arc outside of which the map is the identity
    knots: (k, 2) array of local coordinates (u, w), u measured from the
           left endpoint of the support, mapping u ↦ w; the first knot is
           (0, 0) and the last (2r, 2r)
    """

    support: Optional[Arc]
    knots: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float).reshape(-1, 2)
        if self.support is not None:
            length = self.support.length
            if len(knots) < 2:
                raise NotMonotone("knot 이 최소 두 개 필요합니다.")
            if knots[0, 0] != 0.0 or knots[0, 1] != 0.0:
                raise NotMonotone("첫 knot 은 (0, 0) 이어야 합니다.")
            if abs(knots[-1, 0] - length) > 1e-12 or abs(knots[-1, 1] - length) > 1e-12:
                raise NotMonotone("마지막 knot 은 지지 호의 오른쪽 끝점을 고정해야 합니다.")
            knots[-1] = (length, length)
            if np.any(np.diff(knots[:, 0]) <= 0) or np.any(np.diff(knots[:, 1]) <= 0):
                raise NotMonotone("knot 표가 순증가가 아닙니다.")
        knots.setflags(write=False)
        object.__setattr__(self, "knots", knots)

    # ------------------------------------------------------------------
    @classmethod
    def identity(cls) -> "LocalHomeo":
        return cls(None, np.empty((0, 2)))

    @classmethod
    def from_pairs(cls, support: Arc, pairs: Sequence[Tuple[float, float]]) -> "LocalHomeo":
        """Knots given as (point, image) pairs of circle points inside the support."""
        length = support.length
        inner = sorted((float(support.local(a)), float(support.local(b))) for a, b in pairs)
        knots = [(0.0, 0.0)] + inner + [(length, length)]
        return cls(support, np.array(knots))

    @classmethod
    def moving(cls, support: Arc, source: float, target: float) -> "LocalHomeo":
        """The single-knot homeomorphism of the support sending source to target."""
        return cls.from_pairs(support, [(source, target)])

    @classmethod
    def radial(cls, center: float, outer: float, radii: Sequence[Tuple[float, float]]):
        """
        Symmetric homeomorphism of B_outer(center) fixing center and the boundary,
        with radius map d ↦ ρ(d) given by (d, ρ) pairs, 0 < d < outer.
        """
        support = Arc(center, outer, closed=True)
        inner = sorted((float(d), float(rho)) for d, rho in radii)
        left = [(outer - d, outer - rho) for d, rho in reversed(inner)]
        right = [(outer + d, outer + rho) for d, rho in inner]
        knots = [(0.0, 0.0)] + left + [(outer, outer)] + right + [(2 * outer, 2 * outer)]
        return cls(support, np.array(knots))

    # ------------------------------------------------------------------
    @property
    def is_identity(self) -> bool:
        return self.support is None or bool(np.all(self.knots[:, 0] == self.knots[:, 1]))

    @property
    def max_displacement(self) -> float:
        if self.support is None:
            return 0.0
        return float(np.max(np.abs(self.knots[:, 1] - self.knots[:, 0])))

    def __call__(self, z: ArrayLike) -> ArrayLike:
        if self.support is None:
            return z
        u = self.support.local(z)
        inside = np.asarray(u) <= self.support.length
        moved = wrap(self.support.left + np.interp(u, self.knots[:, 0], self.knots[:, 1]))
        result = np.where(inside, moved, z)
        if result.ndim == 0:
            return float(result)
        return result

    def as_plmap(self) -> PLMap:
        """
        Degree-one PLMap equal to this homeomorphism.

        Why: 변위 D(t) = T(t) - t 는 주기 함수이므로, 지지 호가 0 을 가로질러도
        knot 위치를 mod 1 로 정렬하기만 하면 된다
        """
        if self.is_identity:
            return PLMap.identity()
        positions = np.asarray(wrap(self.support.left + self.knots[:, 0]))
        shifts = self.knots[:, 1] - self.knots[:, 0]
        u0 = float(self.support.local(0.0))
        if u0 < self.support.length:
            d0 = float(np.interp(u0, self.knots[:, 0], shifts))
        else:
            d0 = 0.0
        interior = (positions > 0.0) & (positions < 1.0)
        order = np.argsort(positions[interior])
        bp = np.concatenate([[0.0], positions[interior][order], [1.0]])
        disp = np.concatenate([[d0], shifts[interior][order], [d0]])
        return PLMap(bp, bp + disp, 1)

    def to_dict(self) -> dict:
        return {
            "support": self.support.to_dict() if self.support is not None else None,
            "knots": [[float(u), float(w)] for u, w in self.knots],
        }


def compose_local(f: PLMap, homeo: LocalHomeo) -> PLMap:
    """T ∘ f as a PLMap; equals f wherever f lands outside the support of T."""
    if homeo.is_identity:
        return f
    return f.followed_by(homeo.as_plmap())
