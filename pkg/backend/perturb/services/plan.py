"""
섭동 계획과 합성
Why: 구성 단계(T, T₁, T₂)는 데이터로 남겨 두어야 인증서가 같은 계획을 다시 검사할 수 있다
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from circle.services.geometry import Arc, circle_distance
from circle.services.homeo import LocalHomeo, compose_local
from circle.services.pl_map import PLMap

from ..exceptions import MonotonicityBreak, PeriodicityLost

logger = logging.getLogger(__name__)

# 주기성 검사에서 같은 점으로 볼 거리
PERIODIC_TOL = 1e-9


class CaseTag(str, Enum):
    CASE_I = "CaseI"
    CASE_IIA = "CaseIIa"
    CASE_IIB = "CaseIIb"


@dataclass(frozen=True)
class CaseReport:
    """
    Outcome of the case split at one support proxy.

    x0, radius: the working ball B[x₀]; n0: witness length; n1: first return of
    x₀ (Case I); residual: S_{n₁}f(x₀); a0, m0, c_bar: Case II only; q, q0, n_q:
    the periodic target of subcase (a) or the boundary geometry of subcase (b).
    """

    tag: CaseTag
    x0: float
    radius: float
    n0: int
    eta: float
    drift: float = 0.0
    n1: Optional[int] = None
    residual: Optional[float] = None
    a0: Optional[float] = None
    m0: Optional[int] = None
    c_bar: Optional[float] = None
    c_bar_error: Optional[float] = None
    q: Optional[float] = None
    q0: Optional[float] = None
    n_q: Optional[int] = None
    center: Optional[float] = None

    @property
    def ball(self) -> Arc:
        """B around the support proxy in Case I, B[x₀] in Case II."""
        center = self.x0 if self.center is None else self.center
        return Arc(center, self.radius, closed=True)

    def with_target(self, q: float, n_q: int) -> "CaseReport":
        return replace(self, q=float(q), n_q=int(n_q))

    def to_dict(self) -> dict:
        data = {
            "tag": self.tag.value,
            "x0": self.x0,
            "radius": self.radius,
            "n0": self.n0,
            "n1": self.n1,
            "residual": self.residual,
            "a0": self.a0,
            "m0": self.m0,
            "cBar": self.c_bar,
            "cBarError": self.c_bar_error,
            "q": self.q,
            "q0": self.q0,
            "nQ": self.n_q,
            "eta": self.eta,
            "drift": self.drift,
            "center": self.center,
        }
        return {k: v for k, v in data.items() if v is not None}


@dataclass(frozen=True)
class AlphaSchedule:
    """
    s: s₀ = R₁ > s₁ > … > s_K
    r: r₁ > … > r_K with r_i = min{Q(s_i), s_i}
    The radius map of T₂ sends r_i ↦ s_{i−1}, R₁ ↦ midpoint of [R₁, R₂] and
    fixes 0 and R₂.
    """

    alpha: float
    n_q: int
    R1: float
    R2: float
    s: Tuple[float, ...]
    r: Tuple[float, ...]

    def __post_init__(self):
        if not (0.0 < self.R1 < self.R2):
            raise MonotonicityBreak(f"0 < R₁ < R₂ 가 아닙니다: R₁={self.R1}, R₂={self.R2}")
        if len(self.s) != len(self.r) + 1 or self.s[0] != self.R1:
            raise MonotonicityBreak("s 는 R₁ 로 시작하고 r 보다 하나 길어야 합니다.")

    @property
    def depth(self) -> int:
        return len(self.r)

    def radius_knots(self) -> list:
        """Interior (d, ρ) knots of the radius map, increasing in d."""
        inner = [(self.r[i], self.s[i]) for i in reversed(range(self.depth))]
        inner.append((self.R1, self.R1 + (self.R2 - self.R1) / 2.0))
        d = np.array([0.0] + [k[0] for k in inner] + [self.R2])
        rho = np.array([0.0] + [k[1] for k in inner] + [self.R2])
        if np.any(np.diff(d) <= 0) or np.any(np.diff(rho) <= 0):
            raise MonotonicityBreak("T₂ 반지름 사상이 순증가가 아닙니다.")
        return inner

    def radius(self, d):
        """ρ(d) = λ·d, the distance of T₂(z) from α when d(z, α) = d."""
        knots = self.radius_knots()
        xs = [0.0] + [k[0] for k in knots] + [self.R2]
        ys = [0.0] + [k[1] for k in knots] + [self.R2]
        return np.where(np.asarray(d) >= self.R2, d, np.interp(d, xs, ys))

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "nQ": self.n_q,
            "R1": self.R1,
            "R2": self.R2,
            "s": list(self.s),
            "r": list(self.r),
        }


@dataclass(frozen=True, eq=False)
class PerturbationPlan:
    tag: CaseTag
    periodic_point: float
    period: int
    steps: Tuple[LocalHomeo, ...] = ()
    schedule: Optional[AlphaSchedule] = None
    context: dict = field(default_factory=dict)

    @property
    def support_arcs(self) -> list:
        return [s.support for s in self.steps if not s.is_identity]

    @property
    def is_identity(self) -> bool:
        return all(s.is_identity for s in self.steps)

    def to_dict(self) -> dict:
        return {
            "tag": self.tag.value,
            "periodicPoint": self.periodic_point,
            "period": self.period,
            "steps": [s.to_dict() for s in self.steps],
            "supportArcs": [a.to_dict() for a in self.support_arcs],
            "schedule": self.schedule.to_dict() if self.schedule else None,
            "context": self.context,
        }


def compose(f: PLMap, steps: Sequence[LocalHomeo]) -> PLMap:
    for step in steps:
        f = compose_local(f, step)
    return f


def periodicity_gap(g: PLMap, point: float, period: int) -> float:
    return circle_distance(g.image(point, period), point)


def _resnap(f: PLMap, plan: PerturbationPlan, g: PLMap) -> PerturbationPlan:
    """
    Rebuild the closing step from where the composed orbit actually lands.

    Every step after the first fixes the periodic point and the intermediate
    orbit points lie outside all supports, so only the first step's knot moves.
    """
    closing = plan.steps[0]
    landing = f(g.image(plan.periodic_point, plan.period - 1))
    rebuilt = LocalHomeo.moving(closing.support, landing, plan.periodic_point)
    return replace(plan, steps=(rebuilt,) + tuple(plan.steps[1:]))


def realize(f: PLMap, plan: PerturbationPlan) -> Tuple[PLMap, PerturbationPlan]:
    """
    Compose the plan onto f and verify the declared periodic orbit.

    One re-snap of the closing step is attempted before PeriodicityLost; the
    returned plan is the one actually composed.
    """
    g = compose(f, plan.steps)
    gap = periodicity_gap(g, plan.periodic_point, plan.period)
    if gap <= PERIODIC_TOL:
        return g, plan
    if plan.steps and not plan.steps[0].is_identity:
        logger.warning("주기 궤도 오차 %.3e, 닫는 단계를 다시 맞춥니다.", gap)
        snapped = _resnap(f, plan, g)
        g = compose(f, snapped.steps)
        gap = periodicity_gap(g, plan.periodic_point, plan.period)
        if gap <= PERIODIC_TOL:
            return g, snapped
    raise PeriodicityLost(
        f"{plan.periodic_point:.9f} 의 주기 {plan.period} 궤도가 {gap:.3e} 만큼 어긋납니다."
    )


def assemble(f: PLMap, plan: PerturbationPlan) -> PLMap:
    return realize(f, plan)[0]
