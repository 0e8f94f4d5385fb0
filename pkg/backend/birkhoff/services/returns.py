"""
첫 귀환 구조 (N_ret, f₂, ψ)
Why: D 는 무한 합집합으로 정의되므로 horizon 안에서 돌아오지 않는 점은 D 밖으로 취급한다
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from circle.services.geometry import Arc
from circle.services.pl_map import PLMap
from circle.services.potential import Potential

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReturnTable:
    """
    points: evaluated points, in the order given
    n_ret: first return time, 0 where the point does not return within the horizon
    image: f₂(x) = f^{N_ret(x)}(x) (nan outside D)
    psi: ψ(x) = S_{N_ret(x)} f(x) / N_ret(x) (nan outside D)
    """

    points: np.ndarray
    n_ret: np.ndarray
    image: np.ndarray
    psi: np.ndarray

    @property
    def returning(self) -> np.ndarray:
        return self.n_ret > 0

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True, eq=False)
class ReturnStructure:
    f: PLMap
    phi: Potential
    domain: Tuple[Arc, ...]
    horizon: int

    def in_domain(self, z) -> Union[bool, np.ndarray]:
        inside = np.zeros(np.shape(z), dtype=bool)
        for arc in self.domain:
            inside = inside | arc.contains(z)
        if inside.ndim == 0:
            return bool(inside)
        return inside

    def evaluate(self, xs) -> ReturnTable:
        """First returns of the given points, all iterated together."""
        points = np.atleast_1d(np.asarray(xs, dtype=float))
        n_ret = np.zeros(len(points), dtype=int)
        image = np.full(len(points), np.nan)
        psi = np.full(len(points), np.nan)

        pts = points.copy()
        sums = np.zeros_like(points)
        pending = np.ones(len(points), dtype=bool)
        for j in range(1, self.horizon + 1):
            sums[pending] += self.phi(pts[pending])
            pts[pending] = self.f(pts[pending])
            hit = pending & self.in_domain(pts)
            n_ret[hit] = j
            image[hit] = pts[hit]
            psi[hit] = sums[hit] / j
            pending &= ~hit
            if not pending.any():
                break
        if pending.any():
            logger.debug("%d 개 점이 horizon %d 안에 돌아오지 않았습니다.", int(pending.sum()), self.horizon)
        return ReturnTable(points, n_ret, image, psi)

    def grid_table(self, resolution: int) -> ReturnTable:
        """Return table over the global grid points of the domain, in lift order per arc."""
        points = np.concatenate([arc.grid_points(resolution) for arc in self.domain])
        return self.evaluate(np.unique(points) if len(self.domain) > 1 else points)


def return_structure(
    f: PLMap,
    phi: Potential,
    domain: Union[Arc, Sequence[Arc]],
    horizon: int,
) -> ReturnStructure:
    if horizon < 1:
        raise ValueError("horizon 은 1 이상이어야 합니다.")
    arcs = (domain,) if isinstance(domain, Arc) else tuple(domain)
    if not arcs:
        raise ValueError("domain 에 호가 최소 하나 필요합니다.")
    return ReturnStructure(f, phi, arcs, int(horizon))
