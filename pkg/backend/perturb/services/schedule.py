"""
T₁ 과 λ 스케줄, T₂
Why: T₂ 는 α 를 고정하고 나머지를 α 에서 밀어내는 반지름 사상이므로,
(d, ρ) knot 표 하나로 λ, 팽창성, 단조성을 모두 표현한다
"""

import logging
from typing import Sequence, Tuple

import numpy as np

from circle.services.geometry import Arc, circle_distance, signed_offset
from circle.services.homeo import LocalHomeo

from ..exceptions import FlatP, MonotonicityBreak, SupportOverflow
from .plan import AlphaSchedule

logger = logging.getLogger(__name__)

# 스케줄 깊이 상한
MAX_DEPTH = 60
# r_{k+1} ≤ SHRINK·r_k 로 순감소를 강제
SHRINK = 0.999


def tube(alpha: float, image: float, delta3: float) -> Arc:
    """V(L): the δ₃-neighbourhood of the segment L from α to f₂(α)."""
    sigma = 1.0 if signed_offset(image, alpha) >= 0 else -1.0
    return Arc.from_endpoints(alpha - sigma * delta3, image + sigma * delta3)


def build_T1(image: float, alpha: float, I: Arc, delta3: float, resolution: int) -> LocalHomeo:
    """Increasing PL bijection of V(L) fixing its ends and sending f₂(α) to α."""
    if circle_distance(image, alpha) == 0.0:
        return LocalHomeo.identity()
    if delta3 < 1.0 / resolution:
        raise SupportOverflow(f"δ₃={delta3:.3e} 가 격자 간격보다 작습니다.")
    support = tube(alpha, image, delta3)
    ends = (support.left, support.right)
    if min(float(I.interior_margin(e)) for e in ends) <= 0.0:
        raise SupportOverflow("V(L) 이 I 의 내부에 들어가지 않습니다.")
    return LocalHomeo.moving(support, image, alpha)


def pseudo_inverse(distances: np.ndarray, envelope: np.ndarray, level: float, cap: float) -> float:
    """
    sup{s ≤ cap : P(s) ≤ level} for the step function P(s) = max{envelope_j : d_j < s}.

    distances must be sorted increasingly and envelope be their running max.
    """
    above = np.flatnonzero(envelope > level)
    if not len(above):
        return cap
    return float(min(distances[above[0]], cap))


def envelopes(
    distances: np.ndarray, psi: np.ndarray, image_distances: np.ndarray, psi_alpha: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Sorted distances, P envelope (running max of ψ − ψ(α)) and Q envelope
    (suffix min of d(f̃₂(z), α)).
    """
    order = np.argsort(distances, kind="stable")
    d = distances[order]
    P = np.maximum.accumulate(psi[order] - psi_alpha)
    Q = np.minimum.accumulate(image_distances[order][::-1])[::-1]
    return d, P, Q


def lambda_schedule(
    alpha: float,
    n_q: int,
    R1: float,
    R2: float,
    distances: Sequence[float],
    psi: Sequence[float],
    image_distances: Sequence[float],
    psi_alpha: float,
    resolution: int,
    eta: float,
) -> AlphaSchedule:
    """
    s₀ = R₁, s_i = pseudo-inverse of P at 2^{−i}·P(R₁), r_i = min{Q(s_i), s_i}.

    Samples are the grid points of W_α with their ψ and d(f̃₂(z), α). The
    sequence stops once s_i falls below the grid spacing or r_i reaches 0.
    """
    distances = np.asarray(distances, dtype=float)
    keep = (distances > 0.0) & (distances < R1)
    d, P, Q = envelopes(
        distances[keep],
        np.asarray(psi, dtype=float)[keep],
        np.asarray(image_distances, dtype=float)[keep],
        psi_alpha,
    )
    top = float(P[-1]) if len(P) else 0.0
    if top <= eta:
        raise FlatP(f"P(R₁) = {top:.3e} ≤ η")

    spacing = 1.0 / resolution
    s: list = [R1]
    r: list = []
    for i in range(1, MAX_DEPTH + 1):
        s_i = min(pseudo_inverse(d, P, top * 2.0**-i, R1), SHRINK * s[-1])
        if s_i < spacing:
            break
        tail = np.flatnonzero(d >= s_i)
        q_i = float(Q[tail[0]]) if len(tail) else R1
        r_i = min(q_i, s_i)
        if r:
            r_i = min(r_i, SHRINK * r[-1])
        if r_i <= 0.0:
            break
        s.append(s_i)
        r.append(r_i)
    schedule = AlphaSchedule(alpha, n_q, R1, R2, tuple(s), tuple(r))
    schedule.radius_knots()
    logger.info("λ 스케줄 깊이 %d (P(R₁)=%.3e)", schedule.depth, top)
    return schedule


def build_T2(schedule: AlphaSchedule) -> LocalHomeo:
    """T₂(z) = α + λ(z)(z − α) on B_{R₂}(α), identity outside."""
    knots = schedule.radius_knots()
    homeo = LocalHomeo.radial(schedule.alpha, schedule.R2, knots)
    if np.any(np.diff(homeo.knots[:, 1]) <= 0):
        raise MonotonicityBreak("T₂ knot 표가 순증가가 아닙니다.")
    return homeo
