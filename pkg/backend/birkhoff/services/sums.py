"""
Birkhoff 합과 유한 시간 최대 평균
Why: 이후 모든 판단(m₀, c̄, 경우 분류)은 격자 최대값 + Lipschitz 오차막대로 이뤄진다.
오차막대는 언제나 결과와 함께 반환하고 조용히 버리지 않는다
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from circle.services.geometry import wrap
from circle.services.pl_map import PLMap
from circle.services.potential import Potential

from ..exceptions import NotFound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BirkhoffRecord:
    start: float
    steps: int
    sum: float
    average: float

    @classmethod
    def of(cls, start: float, steps: int, total: float) -> "BirkhoffRecord":
        return cls(float(start), int(steps), float(total), float(total) / steps)

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "steps": self.steps,
            "sum": self.sum,
            "average": self.average,
        }


@dataclass(frozen=True)
class GridMaximum:
    """Grid maximum with a rigorous additive error bar: sup ∈ [value, value + error]."""

    value: float
    error: float
    argmax: Optional[float] = None


def grid(resolution: int) -> np.ndarray:
    return np.arange(resolution) / resolution


def birkhoff_sum(f: PLMap, phi: Potential, x: float, n: int) -> BirkhoffRecord:
    """S_n f(x) = Σ_{i<n} φ(f^i(x))."""
    if n < 1:
        raise ValueError("n 은 1 이상이어야 합니다.")
    orbit = f.iterate(x, n - 1)
    return BirkhoffRecord.of(wrap(x), n, math.fsum(phi(orbit)))


def scan_sums(
    f: PLMap, phi: Potential, points: np.ndarray, n: int
) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
    """
    Yield (k, S_k, f^k) for k = 1..n over an array of starting points.

    Why: 격자 전체를 벡터로 한 번에 굴려야 2¹⁴ 격자에서도 빠르다
    """
    pts = np.array(points, dtype=float)
    sums = np.zeros_like(pts)
    for k in range(1, n + 1):
        sums = sums + phi(pts)
        pts = f(pts)
        yield k, sums, pts


def grid_error_bar(f: PLMap, phi: Potential, m: int, resolution: int) -> float:
    """Lip(φ)·(1 + s + … + s^{m−1})·h / m with s the largest |slope| of f."""
    s = f.max_abs_slope
    try:
        geometric = float(m) if s == 1.0 else (s**m - 1.0) / (s - 1.0)
    except OverflowError:
        return math.inf
    return phi.lipschitz * geometric / (resolution * m)


def max_finite_average(f: PLMap, phi: Potential, m: int, resolution: int) -> GridMaximum:
    """M_m = max over grid points of (1/m)·S_m f, with its error bar."""
    if m < 1:
        raise ValueError("m 은 1 이상이어야 합니다.")
    xs = grid(resolution)
    for k, sums, _ in scan_sums(f, phi, xs, m):
        if k == m:
            i = int(np.argmax(sums))
            return GridMaximum(
                float(sums[i]) / m, grid_error_bar(f, phi, m, resolution), float(xs[i])
            )


def finite_average_table(
    f: PLMap, phi: Potential, m_max: int, resolution: int
) -> Tuple[np.ndarray, np.ndarray]:
    """M_j and their error bars for j = 1..m_max (index 0 unused)."""
    values = np.full(m_max + 1, np.nan)
    errors = np.full(m_max + 1, np.nan)
    for k, sums, _ in scan_sums(f, phi, grid(resolution), m_max):
        values[k] = float(np.max(sums)) / k
        errors[k] = grid_error_bar(f, phi, k, resolution)
    return values, errors


def m_zero(
    f: PLMap,
    phi: Potential,
    a: float,
    resolution: int,
    horizon: int = 64,
    n0: int = 0,
) -> int:
    """
    Smallest m with M_j + error ≤ a/2 for every j in [m, 2m).

    Every n ≥ m splits into blocks with lengths in [m, 2m), so the window
    certifies (1/n)·S_n f ≤ a/2 for all n ≥ m. The result is raised to n0 + 1
    when needed so that m₀ > n₀.
    """
    if a <= 0:
        raise ValueError("a 는 양수여야 합니다.")
    values, errors = finite_average_table(f, phi, 2 * horizon - 1, resolution)
    ok = values + errors <= a / 2.0
    for m in range(1, horizon + 1):
        if ok[m : 2 * m].all():
            m0 = max(m, n0 + 1)
            logger.info("m₀(a=%.3e) = %d (window start %d)", a, m0, m)
            return m0
    raise NotFound(f"horizon {horizon} 안에서 m₀(a={a:.3e}) 창 조건을 만족하지 못했습니다.")
