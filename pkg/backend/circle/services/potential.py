"""
격자 표본 포텐셜 φ
Why: 포텐셜은 균일 격자 위 표본의 선형보간으로 정의한다.
보간 함수 자체가 인증 대상이므로 Lipschitz 상수는 표본 차분에서 정확히 얻어진다
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..exceptions import InvalidPotential
from .geometry import ArrayLike, wrap


@dataclass(frozen=True, eq=False)
class Potential:
    samples: np.ndarray
    lipschitz: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1 or len(samples) < 2:
            raise InvalidPotential("samples 는 길이 2 이상의 1차원 배열이어야 합니다.")
        if not np.all(np.isfinite(samples)):
            raise InvalidPotential("samples 에 유한하지 않은 값이 있습니다.")
        if self.lipschitz < 0:
            raise InvalidPotential("lipschitz 는 0 이상이어야 합니다.")
        jumps = np.abs(np.diff(np.append(samples, samples[0])))
        bound = self.lipschitz / len(samples)
        if np.any(jumps > bound * (1 + 1e-9) + 1e-12):
            raise InvalidPotential(
                f"인접 표본 차이 {jumps.max():.3e} 가 lipschitz·h = {bound:.3e} 를 넘습니다."
            )
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "lipschitz", float(self.lipschitz))

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], n: int) -> "Potential":
        """Sample fn on the grid i/n; the Lipschitz bound is that of the interpolant."""
        samples = np.asarray(fn(np.arange(n) / n), dtype=float)
        if samples.ndim == 0:
            samples = np.full(n, float(samples))
        jumps = np.abs(np.diff(np.append(samples, samples[0])))
        return cls(samples, float(jumps.max()) * n)

    @classmethod
    def constant(cls, value: float, n: int = 16) -> "Potential":
        return cls(np.full(n, float(value)), 0.0)

    @property
    def resolution(self) -> int:
        return len(self.samples)

    @property
    def spacing(self) -> float:
        return 1.0 / len(self.samples)

    def __call__(self, x: ArrayLike) -> ArrayLike:
        n = len(self.samples)
        pos = np.asarray(wrap(x), dtype=float) * n
        i = np.floor(pos).astype(int) % n
        w = pos - np.floor(pos)
        value = (1.0 - w) * self.samples[i] + w * self.samples[(i + 1) % n]
        if value.ndim == 0:
            return float(value)
        return value

    def shifted(self, beta: float) -> "Potential":
        return Potential(self.samples - beta, self.lipschitz)

    def bin_maxima(self, bins: int) -> np.ndarray:
        """
        Exact maximum of the interpolant on each bin [j/bins, (j+1)/bins].

        Why: 선형보간의 최댓값은 구간 끝점이나 구간 내부 격자점에서만 나온다
        """
        edges = self(np.arange(bins + 1) / bins)
        result = np.maximum(edges[:-1], edges[1:])
        n = len(self.samples)
        owner = (np.arange(n) * bins) // n
        np.maximum.at(result, owner, self.samples)
        return result
