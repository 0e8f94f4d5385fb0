"""
원 위의 점과 호(arc)
Why: S¹ = ℝ/ℤ 위의 모든 계산은 [0, 1) 대표값과 lift 좌표 두 가지로만 한다
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..exceptions import InvalidArc

# 점은 [0, 1) 안의 float (또는 float 배열)로 표현한다
CirclePoint = float
ArrayLike = Union[float, np.ndarray]

# lift 좌표에서 "같은 점"으로 취급하는 허용 오차
SNAP_TOL = 1e-12


def wrap(x: ArrayLike) -> ArrayLike:
    """Reduce lift coordinates to the representative in [0, 1)."""
    r = np.mod(x, 1.0)
    if np.ndim(r) == 0:
        r = float(r)
        return 0.0 if r >= 1.0 else r
    r[r >= 1.0] = 0.0
    return r


def to_point(value: float) -> CirclePoint:
    """
    Why: 외부 입력(JSON, CLI)을 받은 직후 한 번만 정규화
    """
    if not math.isfinite(value):
        raise InvalidArc(f"점 좌표가 유한하지 않습니다: {value}")
    return wrap(float(value))


def signed_offset(z: ArrayLike, center: ArrayLike) -> ArrayLike:
    """Representative of z - center in [-1/2, 1/2)."""
    return wrap(np.asarray(z) - center + 0.5) - 0.5


def circle_distance(a: ArrayLike, b: ArrayLike) -> ArrayLike:
    d = np.abs(signed_offset(a, b))
    if np.ndim(d) == 0:
        return float(d)
    return d


@dataclass(frozen=True)
class Arc:
    """
    Closed or open metric ball on the circle.

    The arc covers the lift interval [center - radius, center + radius]; the
    closed flag decides whether the two endpoints belong to it.
    """

    center: float
    radius: float
    closed: bool = True

    def __post_init__(self):
        if not (0.0 < self.radius < 0.5):
            raise InvalidArc(f"반지름은 (0, 1/2) 범위여야 합니다: {self.radius}")
        object.__setattr__(self, "center", to_point(self.center))

    @classmethod
    def from_endpoints(cls, a: float, b: float, closed: bool = True) -> "Arc":
        """Shorter arc joining a and b."""
        offset = float(signed_offset(b, a))
        return cls(wrap(a + offset / 2.0), abs(offset) / 2.0, closed)

    @property
    def left(self) -> float:
        """Lift coordinate of the left endpoint (may be negative)."""
        return self.center - self.radius

    @property
    def right(self) -> float:
        return self.center + self.radius

    @property
    def length(self) -> float:
        return 2.0 * self.radius

    def offset(self, z: ArrayLike) -> ArrayLike:
        return signed_offset(z, self.center)

    def contains(self, z: ArrayLike) -> Union[bool, np.ndarray]:
        d = np.abs(self.offset(z))
        inside = d <= self.radius if self.closed else d < self.radius
        if np.ndim(inside) == 0:
            return bool(inside)
        return inside

    def interior_margin(self, z: ArrayLike) -> ArrayLike:
        """Distance from z to the complement of the arc (negative outside)."""
        return self.radius - np.abs(self.offset(z))

    def local(self, z: ArrayLike) -> ArrayLike:
        """Coordinate of z measured from the left endpoint, in [0, 1)."""
        return wrap(np.asarray(z) - self.left)

    def grid_points(self, grid: int) -> np.ndarray:
        """
        Points i/grid inside the arc, ordered from the left endpoint.

        Why: 모든 격자 스캔은 같은 전역 격자를 쓰므로 서로 다른 스캔 결과가 비교 가능하다
        """
        lo = math.ceil(self.left * grid)
        hi = math.floor(self.right * grid)
        idx = np.arange(lo, hi + 1)
        points = wrap(idx / grid)
        return points[self.contains(points)]

    def shrunk(self, factor: float) -> "Arc":
        return Arc(self.center, self.radius * factor, self.closed)

    def as_closed(self) -> "Arc":
        return Arc(self.center, self.radius, True)

    def to_dict(self) -> dict:
        return {"center": self.center, "radius": self.radius, "closed": self.closed}
