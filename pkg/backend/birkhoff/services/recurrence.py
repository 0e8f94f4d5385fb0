"""
재귀 탐색: 비음 Birkhoff 합을 갖는 귀환과 c̄
Why: 존재 정리(Atkinson)는 유한하게 실현할 수 없으므로 유한 horizon 격자 탐색으로 대신한다
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from circle.services.geometry import Arc
from circle.services.pl_map import PLMap
from circle.services.potential import Potential

from ..exceptions import EmptyReturnSet
from .sums import BirkhoffRecord, grid_error_bar, scan_sums

logger = logging.getLogger(__name__)

# c̄ 근처 증인을 이보다 많이 보관하지 않는다
WITNESS_CAP = 10_000


@dataclass(frozen=True)
class NonnegReturn:
    """
    start: point whose orbit returns (f^offset(origin))
    steps: return time n with f^n(start) in the ball
    total: S_n f(start)
    origin: grid point the orbit was launched from
    offset: how many steps after origin the start was taken
    """

    start: float
    steps: int
    total: float
    origin: float
    offset: int


def _with_center(ball: Arc, resolution: int) -> np.ndarray:
    points = ball.grid_points(resolution)
    if not np.any(points == ball.center):
        points = np.append(points, ball.center)
    return points


def find_nonneg_return(
    f: PLMap,
    phi: Potential,
    ball: Arc,
    horizon: int,
    resolution: int,
    eta: float = 1e-6,
    drift: float = 0.0,
) -> Optional[NonnegReturn]:
    """
    Best return (y, n) with f^n(y) ∈ ball and S_n f(y) ≥ −η − n·drift.

    Besides returns of grid points themselves, every orbit is also split at its
    lowest earlier return: if S_{t1} < 0 at a return t1 and a later return t2
    has a larger sum, then y = f^{t1}(origin), n = t2 − t1 is a better witness.
    drift is the per-step uncertainty of the normalizing constant.
    """
    origins = _with_center(ball, resolution)
    lowest = np.zeros_like(origins)
    lowest_time = np.zeros(len(origins), dtype=int)
    lowest_point = origins.copy()
    best: Optional[NonnegReturn] = None

    for t, sums, pts in scan_sums(f, phi, origins, horizon):
        back = ball.contains(pts)
        if not back.any():
            continue
        gain = sums - lowest
        length = t - lowest_time
        ok = back & (gain >= -eta - drift * length - 1e-12)
        if ok.any():
            idx = np.flatnonzero(ok)
            order = np.lexsort((idx, length[idx], -gain[idx]))
            i = int(idx[order[0]])
            better = best is None or gain[i] > best.total
            better = better or (gain[i] == best.total and length[i] < best.steps)
            if better:
                best = NonnegReturn(
                    float(lowest_point[i]),
                    int(length[i]),
                    float(gain[i]),
                    float(origins[i]),
                    int(lowest_time[i]),
                )
        lower = back & (sums < lowest)
        lowest[lower] = sums[lower]
        lowest_time[lower] = t
        lowest_point[lower] = pts[lower]

    if best is None:
        logger.info("find_nonneg_return: 격자 %d 에서 증인을 찾지 못했습니다.", resolution)
    else:
        logger.debug("find_nonneg_return: %s", best)
    return best


@dataclass(frozen=True)
class ReturnWitness:
    record: BirkhoffRecord
    end: float
    first_return: bool


@dataclass(frozen=True)
class CBar:
    """
    c̄ = max_k c_k, c_k = max over grid points of K_k = B[x₀] ∩ f^{−k}(B[x₀])
    of (1/k)·S_k f.
    """

    value: float
    error: float
    witness: BirkhoffRecord
    end: float
    levels: List[float]
    near_optimal: List[ReturnWitness] = field(default_factory=list)


def c_bar(
    f: PLMap,
    phi: Potential,
    x0: float,
    radius: float,
    m0: int,
    resolution: int,
    eta: float = 1e-6,
) -> CBar:
    ball = Arc(x0, radius, closed=True)
    starts = _with_center(ball, resolution)
    first_return = np.zeros(len(starts), dtype=int)
    averages, ends, masks = [], [], []
    levels: List[float] = []

    for k, sums, pts in scan_sums(f, phi, starts, m0):
        back = ball.contains(pts)
        first_return[(first_return == 0) & back] = k
        avg = sums / k
        averages.append(avg)
        ends.append(pts)
        masks.append(back)
        levels.append(float(avg[back].max()) if back.any() else float("nan"))

    finite = [v for v in levels if v == v]
    if not finite:
        raise EmptyReturnSet(f"B[{x0:.6f}, {radius:.3e}] 의 격자점이 {m0} 단계 안에 돌아오지 않습니다.")
    value = max(finite)
    k_best = levels.index(value) + 1
    i_best = int(np.argmax(np.where(masks[k_best - 1], averages[k_best - 1], -np.inf)))
    witness = BirkhoffRecord.of(starts[i_best], k_best, value * k_best)
    error = max(grid_error_bar(f, phi, k, resolution) for k in range(1, m0 + 1))

    near: List[ReturnWitness] = []
    for k in range(1, m0 + 1):
        hit = masks[k - 1] & (averages[k - 1] >= value - eta)
        for i in np.flatnonzero(hit):
            record = BirkhoffRecord.of(starts[i], k, averages[k - 1][i] * k)
            near.append(ReturnWitness(record, float(ends[k - 1][i]), first_return[i] == k))
    near.sort(key=lambda w: (-w.record.average, w.record.steps, w.record.start))
    logger.info("c̄ = %.6e ± %.2e (witness %s, %d near-optimal)", value, error, witness, len(near))
    return CBar(value, error, witness, float(ends[k_best - 1][i_best]), levels, near[:WITNESS_CAP])
