"""
구성 단계별 성질 검사
Why: 인증서는 계획을 다시 구성하지 않고 f, f̂, 계획의 context 만으로 각 단계의 부등식을 격자 위에서 다시 센다
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from birkhoff.services.returns import ReturnTable, return_structure
from birkhoff.services.sums import grid
from circle.exceptions import CircleMaxError
from circle.services.geometry import Arc, circle_distance
from circle.services.pl_map import PLMap
from circle.services.potential import Potential
from perturb.services.plan import PERIODIC_TOL, CaseTag, PerturbationPlan, compose, periodicity_gap

logger = logging.getLogger(__name__)

# f̂ 와 f 가 같다고 볼 거리
AGREEMENT_TOL = 1e-9
# 한 귀환 동안 부동소수 오차가 이 배율 이상 커질 수 있는 점은 세지 않는다
TRUST_GROWTH = 1e6
# 반지름 사상 검사용 표본 수
RADIAL_SAMPLES = 400


@dataclass(frozen=True)
class LemmaCheck:
    passed: bool
    checked: int
    violations: int

    @classmethod
    def skipped(cls) -> "LemmaCheck":
        return cls(True, 0, 0)

    @classmethod
    def count(cls, bad) -> "LemmaCheck":
        bad = np.asarray(bad, dtype=bool).ravel()
        violations = int(bad.sum())
        return cls(violations == 0, int(bad.size), violations)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checked": self.checked, "violations": self.violations}


@dataclass(frozen=True, eq=False)
class CheckInput:
    """
    f, f_hat: the map before and after the perturbation
    phi0: the potential as given (not normalized)
    plan: the plan that produced f_hat; its context carries the construction data
    """

    f: PLMap
    f_hat: PLMap
    phi0: Potential
    plan: PerturbationPlan
    epsilon: float
    resolution: int
    tol: float
    horizon: int = 64

    @property
    def context(self) -> dict:
        return self.plan.context

    @property
    def phi(self) -> Potential:
        return self.phi0.shifted(float(self.context.get("beta", 0.0)))

    def has(self, *keys) -> bool:
        return all(self.context.get(k) is not None for k in keys)

    def arc(self, key: str) -> Optional[Arc]:
        data = self.context.get(key)
        return Arc(**data) if data else None

    def value(self, key: str, default: float = 0.0) -> float:
        value = self.context.get(key)
        return default if value is None else float(value)

    def trusted(self, steps) -> np.ndarray:
        """Return times short enough that rounding cannot grow past TRUST_GROWTH."""
        growth = math.log(max(self.f.max_abs_slope, 1.0))
        return np.asarray(steps) * growth <= math.log(TRUST_GROWTH)


def _first_returns(g: PLMap, phi: Potential, domain: Arc, points, horizon: int) -> ReturnTable:
    return return_structure(g, phi, domain, horizon).evaluate(points)


# ----------------------------------------------------------------------
# 모든 경우


def check_periodicity(inp: CheckInput) -> LemmaCheck:
    gap = periodicity_gap(inp.f_hat, inp.plan.periodic_point, inp.plan.period)
    return LemmaCheck.count([gap > PERIODIC_TOL])


def check_support_containment(inp: CheckInput) -> LemmaCheck:
    """
    f̂(z) = f(z) wherever f(z) misses every support arc, and every support arc
    lies within ε of the support proxy.
    """
    xs = grid(inp.resolution)
    fx = inp.f(xs)
    hit = np.zeros(len(xs), dtype=bool)
    for arc in inp.plan.support_arcs:
        hit |= arc.contains(fx)
    moved = circle_distance(inp.f_hat(xs), fx) > AGREEMENT_TOL
    bad = list(moved[~hit])
    if inp.has("proxy"):
        proxy = inp.value("proxy")
        for arc in inp.plan.support_arcs:
            far = max(circle_distance(arc.left, proxy), circle_distance(arc.right, proxy))
            bad.append(far >= inp.epsilon)
    return LemmaCheck.count(bad)


def check_closed_orbit_average(inp: CheckInput) -> LemmaCheck:
    """
    Average of the normalized potential along the closed orbit: within η plus
    drift of 0 in Case I, of c̄ in Case IIa and equal to ψ(α) in Case IIb.
    """
    plan = inp.plan
    if not inp.has("beta"):
        return LemmaCheck.skipped()
    orbit = inp.f_hat.iterate(plan.periodic_point, plan.period - 1)
    average = math.fsum(inp.phi(orbit)) / plan.period
    slack = inp.value("eta") + inp.tol
    if plan.tag is CaseTag.CASE_I:
        bad = abs(average) > slack + inp.value("drift")
    elif plan.tag is CaseTag.CASE_IIA:
        if not inp.has("cBar"):
            return LemmaCheck.skipped()
        bad = abs(average - inp.value("cBar")) > slack + inp.value("cBarError")
    else:
        if not inp.has("psiAlpha"):
            return LemmaCheck.skipped()
        bad = abs(average - inp.value("psiAlpha")) > inp.tol
    return LemmaCheck.count([bad])


def check_random_tails(averages: np.ndarray, orbit_average: float, tol: float) -> LemmaCheck:
    """Tail averages of random f̂ orbits stay below the closed orbit's average."""
    return LemmaCheck.count(np.asarray(averages) > orbit_average + tol)


# ----------------------------------------------------------------------
# (I), (a)


def check_case_one_blocks(inp: CheckInput) -> LemmaCheck:
    """Every excursion of a grid point of B back to B averages at most η plus drift."""
    if inp.plan.tag is not CaseTag.CASE_I or not inp.has("ball", "beta"):
        return LemmaCheck.skipped()
    ball = inp.arc("ball")
    table = _first_returns(inp.f_hat, inp.phi, ball, ball.grid_points(inp.resolution), inp.horizon)
    limit = inp.value("eta") + inp.value("drift") + inp.tol
    return LemmaCheck.count(table.psi[table.returning] > limit)


def check_case_a_blocks(inp: CheckInput) -> LemmaCheck:
    """Excursions back to B[x₀] of length at most m₀ average at most c̄."""
    if inp.plan.tag is not CaseTag.CASE_IIA or not inp.has("ball", "beta", "m0", "cBar"):
        return LemmaCheck.skipped()
    ball = inp.arc("ball")
    m0 = int(inp.context["m0"])
    table = _first_returns(inp.f_hat, inp.phi, ball, ball.grid_points(inp.resolution), m0)
    limit = inp.value("cBar") + inp.value("cBarError") + inp.tol
    return LemmaCheck.count(table.psi[table.returning] > limit)


# ----------------------------------------------------------------------
# (b)


def _radial_step(inp: CheckInput):
    plan = inp.plan
    if plan.schedule is None or len(plan.steps) < 2:
        return None
    return plan.steps[-1]


def check_expansion(inp: CheckInput) -> LemmaCheck:
    """d(T₂(z), α) > d(z, α) for 0 < d(z, α) < R₁."""
    T2 = _radial_step(inp)
    if T2 is None:
        return LemmaCheck.skipped()
    schedule = inp.plan.schedule
    d = np.linspace(0.0, schedule.R1, RADIAL_SAMPLES + 2)[1:-1]
    z = np.concatenate([schedule.alpha + d, schedule.alpha - d])
    moved = circle_distance(T2(z), schedule.alpha)
    return LemmaCheck.count(moved <= np.concatenate([d, d]))


def check_return_distance_bracket(inp: CheckInput) -> LemmaCheck:
    """s_k ≤ d(T₂(z), α) ≤ s_{k−1} whenever r_{k+1} < d(z, α) < r_k."""
    T2 = _radial_step(inp)
    if T2 is None:
        return LemmaCheck.skipped()
    schedule = inp.plan.schedule
    s, r, alpha = schedule.s, schedule.r, schedule.alpha
    bad = []
    for k in range(1, schedule.depth):
        for t in (0.25, 0.5, 0.75):
            d = r[k] + t * (r[k - 1] - r[k])
            for z in (alpha + d, alpha - d):
                rho = circle_distance(T2(z), alpha)
                bad.append(rho < s[k] - 1e-12 or rho > s[k - 1] + 1e-12)
    return LemmaCheck.count(bad)


def check_perturbed_return_structure(inp: CheckInput) -> LemmaCheck:
    """
    Under f̃ = T₁∘f the grid points of I keep their return time and ψ, and
    f̃₂ = T₁∘f₂.
    """
    plan = inp.plan
    if plan.tag is not CaseTag.CASE_IIB or not plan.steps or not inp.has("I", "horizon", "beta"):
        return LemmaCheck.skipped()
    I = inp.arc("I")
    horizon = int(inp.context["horizon"])
    T1 = plan.steps[0]
    points = I.grid_points(inp.resolution)
    base = _first_returns(inp.f, inp.phi, I, points, horizon)
    tilde = _first_returns(compose(inp.f, plan.steps[:1]), inp.phi, I, points, horizon)
    keep = inp.trusted(np.maximum(base.n_ret, 1))
    bad = base.n_ret[keep] != tilde.n_ret[keep]
    both = keep & base.returning & (base.n_ret == tilde.n_ret)
    psi_off = np.abs(base.psi[both] - tilde.psi[both]) > AGREEMENT_TOL
    image_off = circle_distance(tilde.image[both], T1(base.image[both])) > AGREEMENT_TOL
    return LemmaCheck.count(np.concatenate([bad, psi_off | image_off]))


def check_outside_component_bound(inp: CheckInput) -> LemmaCheck:
    """
    Grid points of I outside W₀ whose first return lands in B[x₀] within m₀
    steps average at most c̄.
    """
    if inp.plan.tag is not CaseTag.CASE_IIB or not inp.has("I", "ball", "m0", "cBar", "beta"):
        return LemmaCheck.skipped()
    I, ball = inp.arc("I"), inp.arc("ball")
    m0 = int(inp.context["m0"])
    points = I.grid_points(inp.resolution)
    points = points[ball.contains(points)]
    w0 = inp.arc("W0")
    if w0 is not None:
        points = points[~w0.contains(points)]
    table = _first_returns(inp.f, inp.phi, I, points, m0)
    landed = table.returning.copy()
    landed[landed] = ball.contains(table.image[landed])
    limit = inp.value("cBar") + inp.value("cBarError") + inp.tol
    return LemmaCheck.count(table.psi[landed] > limit)


def check_excursion_estimate(inp: CheckInput) -> LemmaCheck:
    """n_q·(ψ(z_max) − ψ(α)) − (ψ(α) − ψ(q)) ≤ 0 for the chosen α."""
    if inp.plan.tag is not CaseTag.CASE_IIB or not inp.has("nRet", "psiZMax", "psiAlpha", "psiQ"):
        return LemmaCheck.skipped()
    psi_alpha = inp.value("psiAlpha")
    estimate = inp.value("nRet") * (inp.value("psiZMax") - psi_alpha) - (psi_alpha - inp.value("psiQ"))
    return LemmaCheck.count([estimate > inp.tol])


def _w_alpha_samples(inp: CheckInput):
    """Grid points of W_α whose unperturbed return lands in V(L), closer than R₁ to α."""
    W, V, I = inp.arc("Walpha"), inp.arc("V"), inp.arc("I")
    schedule = inp.plan.schedule
    points = W.grid_points(inp.resolution)
    base = _first_returns(inp.f, inp.phi, I, points, int(inp.context["horizon"]))
    dz = circle_distance(points, schedule.alpha)
    mask = base.returning & (dz > 0.0) & (dz < schedule.R1) & inp.trusted(base.n_ret)
    mask[mask] = V.contains(base.image[mask])
    return points[mask]


def check_nested_return_contraction(inp: CheckInput) -> LemmaCheck:
    """For z ∈ W_α: d(f̂₂(z), α) < s_k implies d(z, α) ≤ s_{k+1}."""
    if _radial_step(inp) is None or not inp.has("Walpha", "V", "I", "horizon", "beta"):
        return LemmaCheck.skipped()
    schedule = inp.plan.schedule
    h = 1.0 / inp.resolution
    points = _w_alpha_samples(inp)
    table = _first_returns(inp.f_hat, inp.phi, inp.arc("I"), points, int(inp.context["horizon"]))
    ok = table.returning
    dz = circle_distance(points[ok], schedule.alpha)
    dimg = circle_distance(table.image[ok], schedule.alpha)
    bad = np.zeros(len(dz), dtype=bool)
    for k in range(schedule.depth):
        bad |= (dimg < schedule.s[k]) & (dz > schedule.s[k + 1] + h)
    return LemmaCheck.count(bad)


def check_block_average_bound(inp: CheckInput) -> LemmaCheck:
    """
    For z ∈ W_α whose first N returns under f̂₂ stay in W_α: d(z, α) ≤ s_N and
    the average over those N blocks is at most ψ(α) + (ψ(z_max) − ψ(α))/N.
    """
    needed = ("Walpha", "V", "I", "horizon", "beta", "psiAlpha", "psiZMax")
    if _radial_step(inp) is None or not inp.has(*needed):
        return LemmaCheck.skipped()
    schedule = inp.plan.schedule
    W, I = inp.arc("Walpha"), inp.arc("I")
    h = 1.0 / inp.resolution
    psi_alpha, psi_max = inp.value("psiAlpha"), inp.value("psiZMax")
    structure = return_structure(inp.f_hat, inp.phi, I, int(inp.context["horizon"]))

    starts = _w_alpha_samples(inp)
    current = starts.copy()
    totals = np.zeros(len(starts))
    lengths = np.zeros(len(starts), dtype=int)
    bad = []
    for N in range(1, schedule.depth + 1):
        table = structure.evaluate(current)
        alive = table.returning & W.contains(table.image)
        if not alive.any():
            break
        starts, current = starts[alive], table.image[alive]
        totals = totals[alive] + table.psi[alive] * table.n_ret[alive]
        lengths = lengths[alive] + table.n_ret[alive]
        averages = totals / lengths
        bad.extend(averages > psi_alpha + (psi_max - psi_alpha) / N + inp.tol)
        bad.extend(circle_distance(starts, schedule.alpha) > schedule.s[N] + h)
    return LemmaCheck.count(bad)


CHECKS: Dict[str, Callable[[CheckInput], LemmaCheck]] = {
    "periodicity": check_periodicity,
    "support_containment": check_support_containment,
    "closed_orbit_average": check_closed_orbit_average,
    "case_one_blocks": check_case_one_blocks,
    "case_a_blocks": check_case_a_blocks,
    "expansion": check_expansion,
    "return_distance_bracket": check_return_distance_bracket,
    "perturbed_return_structure": check_perturbed_return_structure,
    "outside_component_bound": check_outside_component_bound,
    "excursion_estimate": check_excursion_estimate,
    "nested_return_contraction": check_nested_return_contraction,
    "block_average_bound": check_block_average_bound,
}


def run_checks(inp: CheckInput) -> Dict[str, LemmaCheck]:
    results = {}
    for name, check in CHECKS.items():
        try:
            results[name] = check(inp)
        except CircleMaxError as e:
            logger.warning("%s 를 평가하지 못했습니다: %s", name, e)
            results[name] = LemmaCheck(False, 0, 0)
        if not results[name].passed:
            logger.warning("%s: %d/%d 위반", name, results[name].violations, results[name].checked)
    return results
