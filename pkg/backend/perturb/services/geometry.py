"""
(b) 경우의 기하: q₀, P̃, q, E, δ, W₀, α
Why: 1차원에서는 E 가 [q, q₀] 호로 정해지고 연결성분은 격자 위의 연속 구간이 된다
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from birkhoff.services.returns import ReturnStructure, ReturnTable
from birkhoff.services.sums import birkhoff_sum, scan_sums
from circle.services.geometry import SNAP_TOL, Arc, circle_distance, signed_offset, wrap
from circle.services.pl_map import PLMap
from circle.services.potential import Potential

from ..exceptions import DegenerateGeometry, DeltaCollapse, EmptyPreimageSet, NoValidAlpha

logger = logging.getLogger(__name__)

DEFAULT_PREIMAGE_CAP = 100_000


@dataclass(frozen=True)
class PreimageCandidate:
    point: float
    depth: int
    average: float


@dataclass(frozen=True)
class BoundaryGeometry:
    q0: float
    q: float
    n_q: int
    E: Optional[Arc]
    candidates: Tuple[PreimageCandidate, ...]
    eta_used: float

    @property
    def closed(self) -> bool:
        """q = q₀: the witness already closes up."""
        return self.E is None


def iterated_preimages(
    f: PLMap, target: float, depth: int, cap: int = DEFAULT_PREIMAGE_CAP
) -> List[Tuple[float, int]]:
    """(z, i) with f^i(z) = target, 1 ≤ i ≤ depth, smallest i kept per point."""
    found: dict = {}
    level = np.array([wrap(target)])
    for i in range(1, depth + 1):
        nxt = [f.preimages(y) for y in level]
        level = np.concatenate(nxt) if nxt else np.empty(0)
        if len(level) > cap:
            logger.warning("역상 %d 개를 %d 개로 자릅니다 (깊이 %d).", len(level), cap, i)
            level = level[:cap]
        for z in level:
            found.setdefault(round(float(z), 12), (float(z), i))
        if not len(level):
            break
    return sorted(found.values())


def build_E_q_q0(
    f: PLMap,
    phi: Potential,
    ball: Arc,
    q0: float,
    c_bar: float,
    m0: int,
    eta: float,
    cap: int = DEFAULT_PREIMAGE_CAP,
) -> BoundaryGeometry:
    """
    P̃ = {z ∈ P : (1/n_z)·S_{n_z}f(z) ≥ c̄ − η}, q its element closest to q₀,
    E = [q, q₀]. η is widened tenfold once before EmptyPreimageSet.
    """
    preimages = [(z, i) for z, i in iterated_preimages(f, q0, m0, cap) if ball.contains(z)]
    candidates = tuple(
        PreimageCandidate(z, i, birkhoff_sum(f, phi, z, i).average) for z, i in preimages
    )
    for tolerance in (eta, 10.0 * eta):
        good = [c for c in candidates if c.average >= c_bar - tolerance]
        if good:
            break
        logger.info("P̃ 가 비어 있습니다 (η=%.1e).", tolerance)
    else:
        raise EmptyPreimageSet(
            f"q₀={q0:.9f} 의 역상 {len(candidates)} 개 중 c̄−η 이상인 것이 없습니다."
        )

    best = min(good, key=lambda c: (circle_distance(c.point, q0), -c.average, c.depth))
    if circle_distance(best.point, q0) <= SNAP_TOL:
        return BoundaryGeometry(q0, best.point, best.depth, None, candidates, tolerance)
    E = Arc.from_endpoints(best.point, q0)
    logger.info("q=%.9f (n_q=%d), q₀=%.9f, |E|=%.3e", best.point, best.depth, q0, E.length)
    return BoundaryGeometry(q0, best.point, best.depth, E, candidates, tolerance)


def direction(q: float, q0: float) -> float:
    """+1 when q₀ lies counterclockwise of q."""
    return 1.0 if signed_offset(q0, q) >= 0 else -1.0


def domain_I(q: float, q0: float, delta: float) -> Arc:
    """I = E ∪ B_δ[q₀], one arc from q to q₀ + σδ."""
    sigma = direction(q, q0)
    return Arc.from_endpoints(q, q0 + sigma * delta)


def ordered_samples(arc: Arc, resolution: int, extra: float) -> Tuple[np.ndarray, int]:
    """Grid points of the arc plus extra, sorted from the left end; index of extra."""
    points = arc.grid_points(resolution)
    points = points[circle_distance(points, extra) > SNAP_TOL]
    points = np.append(points, wrap(extra))
    order = np.argsort(arc.local(points), kind="stable")
    points = points[order]
    return points, int(np.flatnonzero(order == len(order) - 1)[0])


def contiguous_run(mask: np.ndarray, index: int) -> Tuple[int, int]:
    """Maximal [lo, hi] with mask true throughout and lo ≤ index ≤ hi."""
    if not mask[index]:
        return index, index - 1
    lo = index
    while lo > 0 and mask[lo - 1]:
        lo -= 1
    hi = index
    while hi < len(mask) - 1 and mask[hi + 1]:
        hi += 1
    return lo, hi


def separation_violations(
    f: PLMap,
    phi: Potential,
    q: float,
    q0: float,
    delta: float,
    c_bar: float,
    m0: int,
    eta: float,
    resolution: int,
) -> np.ndarray:
    """
    Grid points of I outside the q-run that reach B_δ[q₀] within m₀ steps with
    average ≥ c̄ − η/2.
    """
    I = domain_I(q, q0, delta)
    target = Arc(q0, delta)
    points, iq = ordered_samples(I, resolution, q)
    hits = np.zeros(len(points), dtype=bool)
    bad = np.zeros(len(points), dtype=bool)
    for j, sums, pts in scan_sums(f, phi, points, m0):
        inside = target.contains(pts)
        hits |= inside
        bad |= inside & (sums / j >= c_bar - eta / 2.0)
    lo, hi = contiguous_run(hits, iq)
    outside = np.ones(len(points), dtype=bool)
    outside[lo : hi + 1] = False
    return points[bad & outside]


def find_delta(
    f: PLMap,
    phi: Potential,
    q: float,
    q0: float,
    c_bar: float,
    m0: int,
    eta: float,
    resolution: int,
) -> float:
    """
    Largest δ = d(q, q₀)/2^k such that every grid point of I outside the
    contiguous run around q stays below c̄ − η/2 on its visits to B_δ[q₀].
    """
    delta = circle_distance(q, q0) / 2.0
    spacing = 1.0 / resolution
    while delta >= spacing:
        bad = separation_violations(f, phi, q, q0, delta, c_bar, m0, eta, resolution)
        if not len(bad):
            logger.info("δ = %.3e", delta)
            return delta
        logger.debug("δ=%.3e 에서 위반 %d 개", delta, len(bad))
        delta /= 2.0
    raise DeltaCollapse(f"δ 가 격자 간격 {spacing:.1e} 아래로 줄었습니다.")


@dataclass(frozen=True)
class ReturnComponent:
    """W₀ sampled on the grid: the contiguous run around q of points with
    f₂ ∈ B_δ[q₀] and N_ret = N_ret(q)."""

    table: ReturnTable
    q_index: int
    lo: int
    hi: int

    @property
    def points(self) -> np.ndarray:
        return self.table.points[self.lo : self.hi + 1]

    @property
    def psi(self) -> np.ndarray:
        return self.table.psi[self.lo : self.hi + 1]

    @property
    def images(self) -> np.ndarray:
        return self.table.image[self.lo : self.hi + 1]

    @property
    def n_ret(self) -> int:
        return int(self.table.n_ret[self.q_index])

    @property
    def psi_q(self) -> float:
        return float(self.table.psi[self.q_index])

    def arc(self) -> Optional[Arc]:
        pts = self.points
        if len(pts) < 2:
            return None
        return Arc.from_endpoints(pts[0], pts[-1])


def return_component(
    returns: ReturnStructure, q: float, target: Arc, resolution: int
) -> ReturnComponent:
    I = returns.domain[0]
    points, iq = ordered_samples(I, resolution, q)
    table = returns.evaluate(points)
    n_q = table.n_ret[iq]
    if n_q == 0:
        raise DegenerateGeometry(f"q={q:.9f} 가 horizon {returns.horizon} 안에 I 로 돌아오지 않습니다.")
    inside = table.returning & (table.n_ret == n_q)
    inside[inside] = target.contains(table.image[inside])
    lo, hi = contiguous_run(inside, iq)
    if hi < lo:
        raise DegenerateGeometry("q 의 첫 귀환 f₂(q) 가 B_δ[q₀] 밖입니다.")
    return ReturnComponent(table, iq, lo, hi)


def choose_alpha(
    component: ReturnComponent,
    m0: int,
    eligible: np.ndarray,
) -> Tuple[float, float]:
    """
    z_max = argmax ψ on W₀, α = eligible grid point of W₀ with
    4·m₀·(ψ(z_max) − ψ(α)) ≤ |ψ(α) − ψ(q)|, largest ψ first, then closest to z_max.

    Raises NoValidAlpha (carrying the best eligible point) when the inequality
    fails everywhere.
    """
    psi, points = component.psi, component.points
    z_max = float(points[int(np.argmax(psi))])
    psi_max = float(np.max(psi))
    idx = np.flatnonzero(eligible)
    if not len(idx):
        raise DegenerateGeometry("W₀ 에 I 의 경계에서 떨어진 격자점이 없습니다.")
    order = sorted(idx, key=lambda i: (-psi[i], circle_distance(points[i], z_max)))
    for i in order:
        if 4 * m0 * (psi_max - psi[i]) <= abs(psi[i] - component.psi_q):
            return z_max, float(points[i])
    raise NoValidAlpha(float(points[order[0]]))
