"""
경우 분류와 경우별 섭동
Why: 정규화된 φ 에서 비음 귀환의 평균이 η 이하면 (I), 아니면 c̄ 를 계산해 (a)/(b) 로 나눈다
"""

import logging
from typing import Optional, Tuple

import numpy as np

from birkhoff.exceptions import NotFound
from birkhoff.services.recurrence import CBar, ReturnWitness, c_bar, find_nonneg_return
from birkhoff.services.returns import return_structure
from birkhoff.services.sums import birkhoff_sum, m_zero
from circle.services.geometry import SNAP_TOL, Arc, circle_distance
from circle.services.homeo import LocalHomeo
from circle.services.pl_map import PLMap
from circle.services.potential import Potential

from ..exceptions import DegenerateGeometry, FlatP, NoValidAlpha
from .geometry import build_E_q_q0, choose_alpha, domain_I, find_delta, return_component
from .plan import CaseReport, CaseTag, PerturbationPlan, realize
from .schedule import build_T1, build_T2, lambda_schedule, tube

logger = logging.getLogger(__name__)


def first_return(f: PLMap, ball: Arc, x: float, horizon: int) -> Optional[int]:
    y = x
    for j in range(1, horizon + 1):
        y = f(y)
        if ball.contains(y):
            return j
    return None


def boundary_tolerance(resolution: int) -> float:
    return 2.0 / resolution


def _pick_witness(cbar: CBar, ball: Arc, resolution: int) -> Tuple[Optional[ReturnWitness], ReturnWitness]:
    """(interior first-return witness or None, preferred boundary witness)."""
    tol = boundary_tolerance(resolution)
    interior = None
    for w in cbar.near_optimal:
        if not w.first_return:
            continue
        if ball.interior_margin(w.end) > tol and ball.interior_margin(w.record.start) > tol:
            interior = w
            break
    pool = [w for w in cbar.near_optimal if w.first_return] or list(cbar.near_optimal)
    return interior, pool[0]


def case_split(
    f: PLMap,
    phi: Potential,
    x: float,
    radius: float,
    resolution: int,
    eta: float = 1e-6,
    horizon: int = 64,
    drift: float = 0.0,
) -> CaseReport:
    """
    Case I when the best non-negative return around x sums to at most η;
    otherwise Case II with a₀, m₀, c̄ and the subcase. drift only widens the
    return search, never the threshold.
    """
    search = Arc(x, radius, closed=False)
    found = find_nonneg_return(f, phi, search, horizon, resolution, eta, drift)
    if found is None:
        raise NotFound(f"x={x:.6f} 주변 반지름 {radius:.3e} 에서 비음 귀환이 없습니다.")

    a0 = found.total / found.steps
    if found.total <= eta:
        x0 = found.start
        n1 = first_return(f, search, x0, found.steps)
        residual = birkhoff_sum(f, phi, x0, n1).sum
        logger.info("Case I: x₀=%.9f n₀=%d n₁=%d residual=%.3e", x0, found.steps, n1, residual)
        return CaseReport(
            CaseTag.CASE_I, x0, radius, found.steps, eta, drift,
            n1=n1, residual=residual, center=search.center,
        )

    x0 = found.start
    m0 = m_zero(f, phi, a0, resolution, horizon, n0=found.steps)
    cbar = c_bar(f, phi, x0, radius, m0, resolution, eta)
    ball = Arc(x0, radius)
    interior, boundary = _pick_witness(cbar, ball, resolution)
    common = dict(a0=a0, m0=m0, c_bar=cbar.value, c_bar_error=cbar.error)
    if interior is not None:
        report = CaseReport(
            CaseTag.CASE_IIA, x0, radius, found.steps, eta, drift,
            q=interior.record.start, q0=interior.end, n_q=interior.record.steps, **common,
        )
    else:
        report = CaseReport(
            CaseTag.CASE_IIB, x0, radius, found.steps, eta, drift,
            q0=boundary.end, n_q=boundary.record.steps, **common,
        )
    logger.info("%s: x₀=%.9f a₀=%.3e m₀=%d c̄=%.6e", report.tag.value, x0, a0, m0, cbar.value)
    return report


def _closing_step(support: Arc, source: float, target: float) -> LocalHomeo:
    if circle_distance(source, target) <= SNAP_TOL:
        return LocalHomeo.identity()
    margin = min(float(support.interior_margin(source)), float(support.interior_margin(target)))
    if margin <= SNAP_TOL:
        raise DegenerateGeometry(
            f"{source:.9f} → {target:.9f} 가 지지 호의 경계 위에 있습니다 (margin={margin:.1e})."
        )
    return LocalHomeo.moving(support, source, target)


def perturb_case_one(f: PLMap, phi: Potential, report: CaseReport) -> Tuple[PLMap, PerturbationPlan]:
    """f̃ = T∘f with T supported in B, T(f^{n₁}(x₀)) = x₀."""
    ball = report.ball
    source = f.image(report.x0, report.n1)
    step = _closing_step(ball, source, report.x0)
    plan = PerturbationPlan(
        CaseTag.CASE_I,
        report.x0,
        report.n1,
        (step,),
        context={**report.to_dict(), "ball": ball.to_dict()},
    )
    g, plan = realize(f, plan)
    return g, plan


def perturb_case_a(f: PLMap, phi: Potential, report: CaseReport) -> Tuple[PLMap, PerturbationPlan]:
    """f̃ = T∘f with T supported in B[x₀], T(f^{n_q}(q)) = q."""
    ball = report.ball
    step = _closing_step(ball, f.image(report.q, report.n_q), report.q)
    plan = PerturbationPlan(
        CaseTag.CASE_IIA,
        report.q,
        report.n_q,
        (step,),
        context={**report.to_dict(), "ball": ball.to_dict()},
    )
    return realize(f, plan)


def perturb_case_b(
    f: PLMap,
    phi: Potential,
    report: CaseReport,
    resolution: int,
    horizon_factor: int = 64,
    cap: int = 100_000,
) -> Tuple[PLMap, PerturbationPlan]:
    """
    f̂ = T₂∘T₁∘f: T₁ closes the first return of α onto α inside I, T₂ pushes
    the neighbourhood B_{R₂}(α) away from α along the λ schedule.
    """
    ball = report.ball
    eta = report.eta
    geo = build_E_q_q0(f, phi, ball, report.q0, report.c_bar, report.m0, eta, cap)
    report = report.with_target(geo.q, geo.n_q)
    context = {**report.to_dict(), "ball": ball.to_dict(), "etaUsed": geo.eta_used}
    if geo.closed:
        plan = PerturbationPlan(CaseTag.CASE_IIB, geo.q, geo.n_q, (), context=context)
        return realize(f, plan)

    delta = find_delta(f, phi, geo.q, geo.q0, report.c_bar, report.m0, eta, resolution)
    I = domain_I(geo.q, geo.q0, delta)
    target = Arc(geo.q0, delta)
    horizon = horizon_factor * report.m0
    returns = return_structure(f, phi, I, horizon)
    component = return_component(returns, geo.q, target, resolution)

    h = 1.0 / resolution
    pts, images = component.points, component.images
    # δ₃ 가 격자 간격 이상이 되려면 α 와 f₂(α) 모두 I 경계에서 2h 떨어져야 한다
    eligible = (np.asarray(I.interior_margin(pts)) >= 2 * h) & (
        np.asarray(target.interior_margin(images)) >= 2 * h
    )
    eligible &= np.asarray(geo.E.interior_margin(pts)) > 0.0
    try:
        z_max, alpha = choose_alpha(component, report.m0, eligible)
        alpha_fallback = False
    except NoValidAlpha as e:
        z_max, alpha = float(pts[int(np.argmax(component.psi))]), e.args[0]
        alpha_fallback = True
        logger.warning("α 부등식을 만족하는 격자점이 없어 %.9f 로 대체합니다.", alpha)
    ia = int(np.flatnonzero(pts == alpha)[0])
    psi_alpha = float(component.psi[ia])
    image_alpha = float(images[ia])

    delta3 = 0.5 * min(float(I.interior_margin(alpha)), float(I.interior_margin(image_alpha)))
    T1 = build_T1(image_alpha, alpha, I, delta3, resolution)
    V = tube(alpha, image_alpha, delta3) if not T1.is_identity else None

    edge = float(geo.E.interior_margin(alpha))
    R1, R2 = 0.5 * edge, 0.75 * edge
    in_tube = V.contains(images) if V is not None else circle_distance(images, alpha) == 0.0
    w_alpha = in_tube & (circle_distance(pts, alpha) < R1)
    image_tilde = np.asarray(T1(images[w_alpha]))
    steps = [T1]
    schedule = None
    try:
        schedule = lambda_schedule(
            alpha,
            component.n_ret,
            R1,
            R2,
            circle_distance(pts[w_alpha], alpha),
            component.psi[w_alpha],
            circle_distance(image_tilde, alpha),
            psi_alpha,
            resolution,
            eta,
        )
        steps.append(build_T2(schedule))
    except FlatP as e:
        logger.info("T₂ = identity: %s", e)

    w_arc = Arc.from_endpoints(pts[w_alpha][0], pts[w_alpha][-1]) if w_alpha.sum() > 1 else None
    w0_arc = component.arc()
    context.update(
        {
            "delta": delta,
            "delta3": delta3,
            "I": I.to_dict(),
            "E": geo.E.to_dict(),
            "target": target.to_dict(),
            "W0": w0_arc.to_dict() if w0_arc else None,
            "Walpha": w_arc.to_dict() if w_arc else None,
            "V": V.to_dict() if V else None,
            "zMax": z_max,
            "alpha": alpha,
            "alphaFallback": alpha_fallback,
            "psiAlpha": psi_alpha,
            "psiZMax": float(np.max(component.psi)),
            "psiQ": component.psi_q,
            "nRet": component.n_ret,
            "horizon": horizon,
        }
    )
    plan = PerturbationPlan(CaseTag.CASE_IIB, alpha, component.n_ret, tuple(steps), schedule, context)
    return realize(f, plan)
