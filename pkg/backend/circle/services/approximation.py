"""
표본 사상의 PL 근사
Why: 역상이 유한한 사상이 조밀하다는 사실의 1차원 버전.
삼각분할 대신 격자 보간을 쓰고, 평평한 구간만 작은 텐트로 기울여 기울기 0 을 없앤다
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..exceptions import InvalidMap, ResolutionTooCoarse
from .geometry import circle_distance, signed_offset
from .pl_map import PLMap

logger = logging.getLogger(__name__)

DEFAULT_MIN_SLOPE = 1e-3


@dataclass(frozen=True, eq=False)
class SampledMap:
    """Circle map sampled at i/n with a declared Lipschitz modulus."""

    samples: np.ndarray
    lipschitz: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or len(samples) < 2:
            raise InvalidMap("samples 는 길이 2 이상의 1차원 배열이어야 합니다.")
        object.__setattr__(self, "samples", np.mod(samples, 1.0))

    @classmethod
    def from_map(cls, fn, n: int, lipschitz: float) -> "SampledMap":
        return cls(np.asarray(fn(np.arange(n) / n), dtype=float), lipschitz)

    @property
    def spacing(self) -> float:
        return 1.0 / len(self.samples)


def _flat_runs(flat: np.ndarray) -> List[Tuple[int, int]]:
    """Maximal runs of flat pieces as (first node, last node)."""
    runs = []
    start = None
    for i, is_flat in enumerate(flat):
        if is_flat and start is None:
            start = i
        elif not is_flat and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(flat)))
    return runs


def pl_approximate(
    sampled: SampledMap, epsilon: float, min_slope: float = DEFAULT_MIN_SLOPE
) -> PLMap:
    """
    PLMap with nonzero slopes, ε-close to the samples, same degree.

    Flat runs (|slope| < min_slope) are replaced by a tent whose halves climb
    and descend at ±ε/2 on top of the run's mean rise, so the tent height is
    ε·width/4.
    """
    if epsilon <= 0:
        raise ValueError("epsilon 은 양수여야 합니다.")
    n = len(sampled.samples)
    h = sampled.spacing
    # 선언된 연속성 모듈러스로 표본 사이를 인증할 수 있어야 한다
    if sampled.lipschitz * h >= min(0.5, epsilon / 2.0):
        raise ResolutionTooCoarse(
            f"표본 간격 {h:.3e} 에서 lipschitz {sampled.lipschitz:.3e} 로는 "
            f"ε={epsilon} 근접성을 보장할 수 없습니다."
        )

    samples = sampled.samples
    increments = signed_offset(np.roll(samples, -1), samples)
    lift = samples[0] + np.concatenate([[0.0], np.cumsum(increments)])
    degree = int(round(lift[-1] - lift[0]))
    lift[-1] = lift[0] + degree
    nodes = np.arange(n + 1) * h

    flat = np.abs(increments) < min_slope * h
    runs = _flat_runs(flat)
    keep = np.ones(n + 1, dtype=bool)
    extra_t: List[float] = []
    extra_v: List[float] = []
    tent = epsilon / 2.0
    for a, b in runs:
        width = (b - a) * h
        rise = (lift[b] - lift[a]) / width
        height = tent * width / 2.0
        if min(abs(rise + tent), abs(rise - tent)) < min_slope:
            raise ResolutionTooCoarse(
                f"폭 {width:.3e} 의 평평한 구간을 기울기 {min_slope} 이상으로 만들 수 없습니다."
            )
        keep[a + 1 : b] = False
        extra_t.append((nodes[a] + nodes[b]) / 2.0)
        extra_v.append((lift[a] + lift[b]) / 2.0 + height)
    if runs:
        logger.info("평평한 구간 %d 개를 텐트로 교체했습니다.", len(runs))

    bp = np.concatenate([nodes[keep], extra_t])
    lv = np.concatenate([lift[keep], extra_v])
    order = np.argsort(bp)
    approx = PLMap(bp[order], lv[order], degree).simplified()

    deviation = float(np.max(circle_distance(approx(nodes[:-1]), samples)))
    if deviation >= epsilon:
        raise ResolutionTooCoarse(f"표본점 편차 {deviation:.3e} 가 ε={epsilon} 이상입니다.")
    logger.debug("pl_approximate: pieces=%d deviation=%.3e", approx.pieces, deviation)
    return approx
