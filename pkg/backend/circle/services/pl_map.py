"""
구간별 선형(PL) 원 자기사상
Why: lift 를 꺾은선으로 저장하면 평가, 역상, 합성, C⁰ 거리가 모두 구간별 1차식 계산이 된다
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..exceptions import InvalidMap, ZeroSlopePiece
from .geometry import SNAP_TOL, ArrayLike, circle_distance, wrap

logger = logging.getLogger(__name__)

# 합성 후 이보다 가까운 꺾임점은 하나로 합친다
MERGE_GAP = 1e-14


def _strictly_increasing(values: np.ndarray, gap: float = MERGE_GAP) -> np.ndarray:
    """Sorted copy of values with near-duplicates removed (first kept)."""
    values = np.sort(values)
    keep = np.ones(len(values), dtype=bool)
    last = values[0]
    for i in range(1, len(values)):
        if values[i] - last <= gap:
            keep[i] = False
        else:
            last = values[i]
    return values[keep]


@dataclass(frozen=True, eq=False)
class PLMap:
    """
    Continuous piecewise-linear circle endomorphism given by its lift.

    breakpoints: 0 = t_0 < ... < t_k = 1
    lift_values: F(t_0), ..., F(t_k) with F(t_k) = F(t_0) + degree
    """

    breakpoints: np.ndarray
    lift_values: np.ndarray
    degree: int

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        lv = np.asarray(self.lift_values, dtype=float)
        if bp.ndim != 1 or bp.shape != lv.shape or len(bp) < 2:
            raise InvalidMap("breakpoints 와 liftValues 의 길이가 맞지 않습니다.")
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise InvalidMap("breakpoints 는 0 에서 시작해 1 에서 끝나야 합니다.")
        if np.any(np.diff(bp) <= 0):
            raise InvalidMap("breakpoints 는 순증가해야 합니다.")
        if not np.all(np.isfinite(lv)):
            raise InvalidMap("liftValues 에 유한하지 않은 값이 있습니다.")
        if abs(lv[-1] - lv[0] - self.degree) > 1e-9:
            raise InvalidMap(
                f"liftValues 끝값 차이({lv[-1] - lv[0]})가 degree({self.degree})와 다릅니다."
            )
        lv = lv.copy()
        lv[-1] = lv[0] + self.degree
        bp.setflags(write=False)
        lv.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "lift_values", lv)
        object.__setattr__(self, "degree", int(self.degree))

    # ------------------------------------------------------------------
    # 생성자
    # ------------------------------------------------------------------
    @classmethod
    def linear(cls, degree: int, shift: float = 0.0) -> "PLMap":
        """t ↦ degree·t + shift."""
        return cls(np.array([0.0, 1.0]), np.array([shift, shift + degree]), degree)

    @classmethod
    def identity(cls) -> "PLMap":
        return cls.linear(1)

    @classmethod
    def rotation(cls, angle: float) -> "PLMap":
        return cls.linear(1, angle)

    @classmethod
    def doubling(cls) -> "PLMap":
        return cls.linear(2)

    @classmethod
    def from_slopes(cls, breakpoints, slopes, start: float = 0.0) -> "PLMap":
        """Build the lift from piece slopes; the degree is the total rise."""
        bp = np.asarray(breakpoints, dtype=float)
        rises = np.diff(bp) * np.asarray(slopes, dtype=float)
        lv = start + np.concatenate([[0.0], np.cumsum(rises)])
        degree = int(round(lv[-1] - lv[0]))
        return cls(bp, lv, degree)

    # ------------------------------------------------------------------
    # 기본 성질
    # ------------------------------------------------------------------
    @property
    def pieces(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.lift_values) / np.diff(self.breakpoints)

    @property
    def max_abs_slope(self) -> float:
        return float(np.max(np.abs(self.slopes)))

    @property
    def has_finite_preimages(self) -> bool:
        return bool(np.all(self.slopes != 0.0))

    @property
    def is_surjective(self) -> bool:
        return float(np.ptp(self.lift_values)) >= 1.0 - SNAP_TOL

    def lift(self, t: ArrayLike) -> ArrayLike:
        """Lift F evaluated at real t, using F(t + 1) = F(t) + degree."""
        t = np.asarray(t, dtype=float)
        base = np.floor(t)
        value = np.interp(t - base, self.breakpoints, self.lift_values)
        value = value + self.degree * base
        if value.ndim == 0:
            return float(value)
        return value

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return wrap(self.lift(x))

    def iterate(self, x: float, n: int) -> np.ndarray:
        """Orbit x, f(x), ..., f^n(x)."""
        orbit = np.empty(n + 1)
        orbit[0] = wrap(x)
        for i in range(n):
            orbit[i + 1] = self(orbit[i])
        return orbit

    def image(self, x: ArrayLike, n: int) -> ArrayLike:
        for _ in range(n):
            x = self(x)
        return x

    # ------------------------------------------------------------------
    # 역상과 합성
    # ------------------------------------------------------------------
    def preimages(self, y: float) -> np.ndarray:
        """
        All x with f(x) = y, one linear solve per piece.

        Why: 상수 구간이 있으면 역상이 무한집합이므로 계산을 거부한다
        """
        slopes = self.slopes
        if np.any(slopes == 0.0):
            raise ZeroSlopePiece("기울기 0 인 구간이 있어 역상이 유한하지 않습니다.")
        y = wrap(y)
        found: List[float] = []
        for i in range(self.pieces):
            v0, v1 = self.lift_values[i], self.lift_values[i + 1]
            lo, hi = min(v0, v1), max(v0, v1)
            for k in range(math.ceil(lo - y), math.floor(hi - y) + 1):
                t = self.breakpoints[i] + (y + k - v0) / slopes[i]
                t = min(max(t, self.breakpoints[i]), self.breakpoints[i + 1])
                found.append(wrap(t))
        if not found:
            return np.empty(0)
        points = _strictly_increasing(np.array(found), gap=1e-12)
        if len(points) > 1 and points[0] + 1.0 - points[-1] <= 1e-12:
            points = points[:-1]
        return points

    def followed_by(self, outer: "PLMap") -> "PLMap":
        """
        The composition outer ∘ self as a PLMap.

        New breakpoints are self's breakpoints merged with the self-preimages of
        outer's breakpoints (shifted by integers).
        """
        candidates = [self.breakpoints]
        slopes = self.slopes
        inner_bp = outer.breakpoints[:-1]
        for i in range(self.pieces):
            if slopes[i] == 0.0:
                continue
            v0, v1 = self.lift_values[i], self.lift_values[i + 1]
            lo, hi = min(v0, v1), max(v0, v1)
            ks = np.arange(math.floor(lo) - 1, math.ceil(hi) + 1)
            levels = (inner_bp[None, :] + ks[:, None]).ravel()
            levels = levels[(levels > lo) & (levels < hi)]
            if levels.size:
                candidates.append(self.breakpoints[i] + (levels - v0) / slopes[i])
        bp = _strictly_increasing(np.concatenate(candidates))
        bp = bp[(bp > 0.0) & (bp < 1.0)]
        bp = np.concatenate([[0.0], bp, [1.0]])
        lv = np.asarray(outer.lift(self.lift(bp)), dtype=float)
        degree = self.degree * outer.degree
        lv[-1] = lv[0] + degree
        return PLMap(bp, lv, degree).simplified()

    def power(self, p: int, cap: Optional[int] = None) -> "PLMap":
        """f^p; stops early with None when the piece count would exceed cap."""
        result = self
        for _ in range(p - 1):
            result = result.followed_by(self)
            if cap is not None and result.pieces > cap:
                return None
        return result

    def simplified(self) -> "PLMap":
        """Drop interior breakpoints where the slope does not change."""
        slopes = self.slopes
        scale = np.maximum(np.abs(slopes[1:]), np.abs(slopes[:-1]))
        bend = np.abs(slopes[1:] - slopes[:-1]) > 1e-12 * np.maximum(scale, 1.0)
        keep = np.concatenate([[True], bend, [True]])
        if keep.all():
            return self
        return PLMap(self.breakpoints[keep], self.lift_values[keep], self.degree)

    # ------------------------------------------------------------------
    # 직렬화
    # ------------------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "breakpoints": [float(v) for v in self.breakpoints],
            "liftValues": [float(v) for v in self.lift_values],
            "degree": self.degree,
        }

    def __repr__(self):
        return f"PLMap(pieces={self.pieces}, degree={self.degree})"


def eval_map(f: PLMap, x: ArrayLike) -> ArrayLike:
    return f(x)


def preimages(f: PLMap, y: float) -> np.ndarray:
    return f.preimages(y)


def c0_distance(f: PLMap, g: PLMap) -> float:
    """
    sup_x d(f(x), g(x)), exact for PL lifts.

    Why: 두 lift 의 차이는 병합된 꺾임점 사이에서 선형이므로,
    최댓값은 꺾임점 또는 반정수를 지나는 지점(거리 1/2)에서만 나온다
    """
    bp = _strictly_increasing(np.concatenate([f.breakpoints, g.breakpoints]))
    h = np.asarray(f.lift(bp)) - np.asarray(g.lift(bp))
    half_index = np.floor(h - 0.5)
    if np.any(half_index[1:] != half_index[:-1]):
        return 0.5
    return float(np.max(circle_distance(h, 0.0)))
