"""
주기 궤도 열거와 하한
Why: f^p 의 lift 는 구간별 1차식이라 F^p(t) - t = k 를 조각마다 풀면 주기점이 전부 나온다
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from circle.services.geometry import circle_distance, wrap
from circle.services.pl_map import PLMap
from circle.services.potential import Potential

from ..exceptions import BranchExplosion

logger = logging.getLogger(__name__)

# 같은 점으로 볼 원 위 거리
PERIOD_TOL = 1e-9
DEFAULT_BRANCH_CAP = 200_000


@dataclass(frozen=True)
class Orbit:
    points: Tuple[float, ...]

    @property
    def period(self) -> int:
        return len(self.points)

    def average(self, phi: Potential) -> float:
        return math.fsum(phi(np.array(self.points))) / self.period

    def key(self) -> tuple:
        return tuple(sorted(float(v) for v in np.round(self.points, 9) % 1.0))


@dataclass(frozen=True)
class PeriodicLower:
    """Best periodic-orbit average, plus the best random-orbit tail average."""

    average: float
    orbit: Optional[Orbit]
    random_average: float
    random_start: Optional[float]


def _fixed_points_of_power(g: PLMap) -> List[float]:
    """Solutions of G(t) − t ∈ ℤ on [0, 1), one linear solve per piece."""
    found: List[float] = []
    bp, lv = g.breakpoints, g.lift_values
    for i in range(g.pieces):
        h0, h1 = lv[i] - bp[i], lv[i + 1] - bp[i + 1]
        if abs(h1 - h0) <= 1e-15:
            # 기울기 1 조각: 정수 상수면 조각 전체가 고정점이므로 양 끝점만 기록
            if abs(h0 - round(h0)) <= PERIOD_TOL:
                found.extend([bp[i], bp[i + 1]])
            continue
        lo, hi = min(h0, h1), max(h0, h1)
        for k in range(math.ceil(lo - 1e-12), math.floor(hi + 1e-12) + 1):
            t = bp[i] + (k - h0) / (h1 - h0) * (bp[i + 1] - bp[i])
            found.append(min(max(t, bp[i]), bp[i + 1]))
    return [wrap(t) for t in found]


def minimal_period(f: PLMap, x: float, p: int) -> int:
    y = x
    for d in range(1, p + 1):
        y = f(y)
        if circle_distance(y, x) <= PERIOD_TOL:
            return d
    return p


def periodic_orbits(f: PLMap, p_max: int, cap: int = DEFAULT_BRANCH_CAP) -> List[Orbit]:
    """
    All periodic orbits of period ≤ p_max, deduplicated up to rotation.
    """
    if p_max < 1:
        raise ValueError("p_max 는 1 이상이어야 합니다.")
    orbits: dict = {}
    g = f
    for p in range(1, p_max + 1):
        if p > 1:
            g = g.followed_by(f)
        if g.pieces > cap:
            raise BranchExplosion(f"f^{p} 의 조각 수 {g.pieces} 가 상한 {cap} 을 넘습니다.")
        for x in _fixed_points_of_power(g):
            d = minimal_period(f, x, p)
            orbit = Orbit(tuple(float(v) for v in f.iterate(x, d - 1)))
            orbits.setdefault(orbit.key(), orbit)
    result = sorted(orbits.values(), key=lambda o: (o.period, o.key()))
    logger.info("주기 ≤ %d 궤도 %d 개", p_max, len(result))
    return result


def random_tail_averages(
    f: PLMap, phi: Potential, count: int, length: int, seed: int = 7
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Seeded random starts and the average of φ over the second half of each orbit.

    Orbits are iterated in floating point; under expanding maps they collapse
    onto dyadic points after about 50 steps.
    """
    if count <= 0 or length <= 1:
        return np.empty(0), np.empty(0)
    rng = np.random.default_rng(seed)
    starts = rng.random(count)
    pts = starts.copy()
    tail = length // 2
    sums = np.zeros(count)
    for i in range(length):
        if i >= length - tail:
            sums += phi(pts)
        pts = f(pts)
    return starts, sums / tail


def best_periodic_average(
    f: PLMap,
    phi: Potential,
    p_max: int,
    cap: int = DEFAULT_BRANCH_CAP,
    random_orbits: int = 10_000,
    orbit_length: int = 1_000,
    seed: int = 7,
) -> PeriodicLower:
    """
    Max orbit average over the enumerated orbits, plus random long-orbit tails.

    The tail average of each random orbit is taken over its second half.
    """
    best, best_orbit = -math.inf, None
    for orbit in periodic_orbits(f, p_max, cap):
        value = orbit.average(phi)
        if value > best:
            best, best_orbit = value, orbit

    random_best, random_start = -math.inf, None
    starts, averages = random_tail_averages(f, phi, random_orbits, orbit_length, seed)
    if len(averages):
        j = int(np.argmax(averages))
        random_best, random_start = float(averages[j]), float(starts[j])

    logger.info("주기 궤도 하한 %.9f, 무작위 궤도 꼬리 평균 %.9f", best, random_best)
    return PeriodicLower(best, best_orbit, random_best, random_start)
