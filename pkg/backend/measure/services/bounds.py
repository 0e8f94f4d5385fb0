"""
최대 적분 β 의 상·하한과 포텐셜 정규화
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from circle.services.pl_map import PLMap
from circle.services.potential import Potential

from .orbits import DEFAULT_BRANCH_CAP, PeriodicLower, best_periodic_average
from .ulam import UlamBound, ulam_upper_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MaximizingBound:
    """
    upper: certified LP upper bound (value + error)
    error: width of the LP error bar
    lower: best periodic-orbit average
    """

    upper: float
    error: float
    lower: float
    witness_orbit: Optional[Tuple[float, ...]]
    random_average: float
    ulam: UlamBound

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            "upper": self.upper,
            "error": self.error,
            "lower": self.lower,
            "witnessOrbit": list(self.witness_orbit) if self.witness_orbit else None,
            "randomAverage": self.random_average,
            "bins": self.ulam.model.bins,
        }


def maximizing_bound(
    f: PLMap,
    phi: Potential,
    bins: int,
    p_max: int = 8,
    cap: int = DEFAULT_BRANCH_CAP,
    random_orbits: int = 10_000,
    orbit_length: int = 1_000,
    seed: int = 7,
) -> MaximizingBound:
    ulam = ulam_upper_bound(f, phi, bins)
    lower: PeriodicLower = best_periodic_average(
        f, phi, p_max, cap, random_orbits, orbit_length, seed
    )
    bound = MaximizingBound(
        ulam.upper,
        ulam.error,
        lower.average,
        lower.orbit.points if lower.orbit else None,
        lower.random_average,
        ulam,
    )
    if bound.lower > bound.upper + 1e-9:
        logger.warning("하한 %.9f 가 상한 %.9f 을 넘습니다.", bound.lower, bound.upper)
    return bound


def normalize(phi0: Potential, beta: float) -> Potential:
    """φ = φ₀ − β; the Lipschitz bound is unchanged."""
    return phi0.shifted(beta)


def support_candidates(ulam: UlamBound, count: int = 5) -> List[float]:
    """
    Centers of the bins carrying the most optimal LP mass, heaviest first.

    Why: 최대화 측도의 지지집합에 직접 접근할 수 없으므로 LP 질량이 큰 bin 을 대리로 쓴다
    """
    mass = ulam.bin_mass
    order = np.lexsort((np.arange(len(mass)), -mass))
    chosen = [int(i) for i in order[:count] if mass[i] > 0.0]
    return [float(c) for c in ulam.model.centers()[chosen]]
