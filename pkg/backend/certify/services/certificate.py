"""
인증서 조립
Why: 판정은 f̂ 자신의 불변측도 상한과 비교해야 하므로 LP 와 궤도 하한을 f̂ 위에서 다시 계산한다
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from circle.services.pl_map import PLMap, c0_distance
from circle.services.potential import Potential
from measure.exceptions import BranchExplosion, MeasureError
from measure.services.orbits import DEFAULT_BRANCH_CAP, best_periodic_average, random_tail_averages
from measure.services.ulam import ulam_upper_bound
from perturb.services.plan import PerturbationPlan

from .checks import CheckInput, LemmaCheck, check_random_tails, run_checks

logger = logging.getLogger(__name__)

# CSV 에 남길 무작위 궤적 수와 길이
TRAJECTORY_COUNT = 3
TRAJECTORY_LENGTH = 200


@dataclass(frozen=True)
class Trajectory:
    """One f̂ orbit with the running average of φ₀ along it."""

    kind: str
    points: Tuple[float, ...]
    running: Tuple[float, ...]

    @classmethod
    def of(cls, kind: str, f: PLMap, phi0: Potential, start: float, length: int) -> "Trajectory":
        points = np.asarray(f.iterate(start, length - 1))
        running = np.cumsum(phi0(points)) / np.arange(1, length + 1)
        return cls(kind, tuple(float(x) for x in points), tuple(float(v) for v in running))


@dataclass(frozen=True)
class Certificate:
    """
    upper_bound, upper_bound_error: Ulam LP value for f̂ and its bar
    lower_bound_oracle: best periodic or random-tail average found for f̂
    base_upper_bound: the certified bound for the unperturbed f, for context
    """

    epsilon: float
    distance: float
    orbit: Tuple[float, ...]
    period: int
    orbit_average: float
    upper_bound: Optional[float]
    upper_bound_error: Optional[float]
    lower_bound_oracle: Optional[float]
    lemma_checks: Dict[str, LemmaCheck]
    verdict: bool
    tol: float
    bins: int
    grid: int
    seed: int
    tag: str
    base_upper_bound: Optional[float] = None
    trajectories: Tuple[Trajectory, ...] = field(default=(), compare=False, repr=False)

    @property
    def failures(self) -> List[str]:
        return [name for name, check in self.lemma_checks.items() if not check.passed]


def _finite(value) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def lower_oracle(
    f_hat: PLMap,
    phi0: Potential,
    p_max: int,
    cap: int,
    random_orbits: int,
    orbit_length: int,
    seed: int,
) -> Tuple[float, np.ndarray]:
    """
    Best enumerated periodic average of f̂ (p_max halved on BranchExplosion)
    and the random tail averages.
    """
    periodic = -math.inf
    p = p_max
    while p >= 1:
        try:
            periodic = best_periodic_average(f_hat, phi0, p, cap, 0, 0, seed).average
            break
        except BranchExplosion as e:
            logger.info("주기 %d 열거 포기: %s", p, e)
            p //= 2
    _, tails = random_tail_averages(f_hat, phi0, random_orbits, orbit_length, seed)
    best = max([periodic] + ([float(tails.max())] if len(tails) else []))
    return best, tails


def maximality_holds(
    orbit_average: float,
    upper_bound: Optional[float],
    upper_bound_error: Optional[float],
    lower_bound: Optional[float],
    tol: float,
) -> bool:
    if upper_bound is None or upper_bound_error is None:
        return False
    if orbit_average + tol < upper_bound - upper_bound_error:
        return False
    return lower_bound is None or orbit_average + tol >= lower_bound


def certify(
    f: PLMap,
    f_hat: PLMap,
    phi0: Potential,
    plan: PerturbationPlan,
    epsilon: float,
    tol: float = 1e-3,
    bins: int = 4096,
    resolution: int = 16384,
    seed: int = 7,
    p_max: int = 8,
    branch_cap: int = DEFAULT_BRANCH_CAP,
    random_orbits: int = 10_000,
    orbit_length: int = 1_000,
    horizon: int = 64,
    base_upper_bound: Optional[float] = None,
) -> Certificate:
    """
    Closeness, periodicity and maximality of the closed orbit of f̂.

    Failures are recorded in the certificate and never raised.
    """
    distance = c0_distance(f, f_hat)
    orbit = np.asarray(f_hat.iterate(plan.periodic_point, plan.period - 1))
    orbit_average = math.fsum(phi0(orbit)) / plan.period

    try:
        ulam = ulam_upper_bound(f_hat, phi0, bins)
        upper, error = _finite(ulam.value), _finite(ulam.error)
    except MeasureError as e:
        logger.warning("f̂ 의 LP 상한을 구하지 못했습니다: %s", e)
        upper, error = None, None
    lower, tails = lower_oracle(f_hat, phi0, p_max, branch_cap, random_orbits, orbit_length, seed)

    inp = CheckInput(f, f_hat, phi0, plan, epsilon, resolution, tol, horizon)
    checks = run_checks(inp)
    checks["final_tail_average"] = check_random_tails(tails, orbit_average, tol)

    verdict = (
        distance < epsilon
        and maximality_holds(orbit_average, upper, error, _finite(lower), tol)
        and all(c.passed for c in checks.values())
    )

    rng = np.random.default_rng(seed)
    trajectories = [Trajectory.of("orbit", f_hat, phi0, plan.periodic_point, plan.period)]
    for i, start in enumerate(rng.random(TRAJECTORY_COUNT)):
        trajectories.append(Trajectory.of(f"random{i}", f_hat, phi0, float(start), TRAJECTORY_LENGTH))

    certificate = Certificate(
        epsilon=float(epsilon),
        distance=float(distance),
        orbit=tuple(float(x) for x in orbit),
        period=int(plan.period),
        orbit_average=float(orbit_average),
        upper_bound=upper,
        upper_bound_error=error,
        lower_bound_oracle=_finite(lower),
        lemma_checks=checks,
        verdict=bool(verdict),
        tol=float(tol),
        bins=int(bins),
        grid=int(resolution),
        seed=int(seed),
        tag=plan.tag.value,
        base_upper_bound=_finite(base_upper_bound),
        trajectories=tuple(trajectories),
    )
    logger.info(
        "verdict=%s d=%.3e avg=%.9f LP=%s±%s failures=%s",
        certificate.verdict,
        distance,
        orbit_average,
        upper,
        error,
        certificate.failures,
    )
    return certificate
