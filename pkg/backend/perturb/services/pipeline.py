"""
전체 구성 파이프라인
Why: 상한 → 정규화 → 경우 분류 → 섭동 순서는 고정이고, 실패는 지지 후보와 반지름을 바꿔 재시도한다
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

from birkhoff.exceptions import BirkhoffError
from circle.services.pl_map import PLMap
from circle.services.potential import Potential
from measure.services.bounds import MaximizingBound, maximizing_bound, normalize, support_candidates

from ..exceptions import ConstructionFailed, PerturbError
from .cases import case_split, perturb_case_a, perturb_case_b, perturb_case_one
from .plan import CaseReport, CaseTag, PerturbationPlan

logger = logging.getLogger(__name__)

# 작업 반지름 r = RADIUS_FACTOR·ε: (b) 의 I 가 x 에서 3r 이내에 머물도록
RADIUS_FACTOR = 0.28


@dataclass(frozen=True, eq=False)
class ConstructionResult:
    f: PLMap
    f_hat: PLMap
    phi0: Potential
    phi: Potential
    plan: PerturbationPlan
    report: CaseReport
    bound: MaximizingBound
    proxy: float
    attempts: int

    @property
    def beta(self) -> float:
        return self.bound.upper


def construct_at(
    f: PLMap,
    phi: Potential,
    x: float,
    radius: float,
    resolution: int,
    eta: float,
    horizon: int,
    drift: float,
    horizon_factor: int = 64,
    cap: int = 100_000,
):
    report = case_split(f, phi, x, radius, resolution, eta, horizon, drift)
    if report.tag is CaseTag.CASE_I:
        f_hat, plan = perturb_case_one(f, phi, report)
    elif report.tag is CaseTag.CASE_IIA:
        f_hat, plan = perturb_case_a(f, phi, report)
    else:
        f_hat, plan = perturb_case_b(f, phi, report, resolution, horizon_factor, cap)
    return report, f_hat, plan


def construct(
    f: PLMap,
    phi0: Potential,
    epsilon: float,
    resolution: int,
    bins: int,
    eta: float = 1e-6,
    horizon_factor: int = 64,
    retries: int = 3,
    candidates: int = 5,
    p_max: int = 8,
    branch_cap: int = 200_000,
    random_orbits: int = 10_000,
    orbit_length: int = 1_000,
    seed: int = 7,
    bound: Optional[MaximizingBound] = None,
    verify: Optional[Callable[["ConstructionResult"], bool]] = None,
) -> ConstructionResult:
    """
    Run the whole construction for (f, φ₀, ε).

    The working radius starts at 0.28·ε and is halved up to `retries` times;
    each radius tries the heaviest LP bins in turn. When `verify` rejects a
    built f̂ the search moves on as if the attempt had failed; if nothing
    passes, the first rejected result is returned so the caller can report it.
    """
    if not f.has_finite_preimages:
        raise ConstructionFailed("f 에 기울기 0 조각이 있습니다. 먼저 approximate 로 근사하세요.")
    if bound is None:
        bound = maximizing_bound(
            f, phi0, bins, p_max, branch_cap, random_orbits, orbit_length, seed
        )
    phi = normalize(phi0, bound.upper)
    drift = max(bound.upper - bound.lower, 0.0)
    proxies = support_candidates(bound.ulam, candidates)
    logger.info("β=%.9f drift=%.3e proxies=%s", bound.upper, drift, proxies)

    radius = RADIUS_FACTOR * epsilon
    attempts = 0
    errors = []
    rejected: Optional[ConstructionResult] = None
    for level in range(retries + 1):
        for x in proxies:
            attempts += 1
            try:
                report, f_hat, plan = construct_at(
                    f, phi, x, radius, resolution, eta, horizon_factor, drift,
                    horizon_factor, branch_cap,
                )
            except (PerturbError, BirkhoffError) as e:
                logger.info("시도 %d (x=%.6f, r=%.3e) 실패: %s: %s", attempts, x, radius, type(e).__name__, e)
                errors.append(f"{type(e).__name__}: {e}")
                continue
            plan.context.update({"beta": bound.upper, "drift": drift, "proxy": x, "epsilon": epsilon})
            result = ConstructionResult(f, f_hat, phi0, phi, plan, report, bound, x, attempts)
            if verify is not None and not verify(result):
                logger.info("시도 %d (x=%.6f, r=%.3e): %s 판정 거짓", attempts, x, radius, report.tag.value)
                errors.append(f"{report.tag.value}: verdict=false")
                rejected = rejected or result
                continue
            logger.info("%s 구성 성공 (시도 %d)", report.tag.value, attempts)
            return result
        radius /= 2.0
    if rejected is not None:
        logger.warning("검증을 통과한 구성이 없어 시도 %d 의 결과를 돌려줍니다.", rejected.attempts)
        return rejected
    raise ConstructionFailed(f"{attempts} 번 시도가 모두 실패했습니다: " + "; ".join(errors[-3:]))
