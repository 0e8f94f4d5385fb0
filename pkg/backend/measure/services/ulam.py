"""
Ulam 이산화와 최대 적분의 LP 상한
Why: 불변측도는 바깥 전이 그래프 위의 순환(circulation)을 유도하므로,
bin 최댓값 포텐셜로 잰 순환 LP 의 최적값은 sup ∫φdμ 의 인증된 상한이다
"""

import csv
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from circle.services.pl_map import PLMap
from circle.services.potential import Potential

from ..exceptions import LPInfeasible

logger = logging.getLogger(__name__)

# 전이 분율을 추정할 때 bin 하나당 찍는 표본 수
SUBSAMPLES = 8
EDGE_SLACK = 1e-12
# 부동소수로 잰 값이 최댓값에서 이만큼 안쪽인 변만 유리수로 다시 잰다
EXACT_BAND = 1e-9


@dataclass(frozen=True, eq=False)
class UlamModel:
    """
    bins: number of bins [j/n, (j+1)/n)
    transition: row-stochastic sparse matrix of mass fractions under f
    bin_potential: exact max of φ on each closed bin
    sources, targets: edges of the outer transition graph, i → j whenever
                      f(bin i) meets bin j
    """

    bins: int
    transition: sparse.csr_matrix
    bin_potential: np.ndarray
    sources: np.ndarray
    targets: np.ndarray

    @property
    def edges(self) -> int:
        return len(self.sources)

    def centers(self) -> np.ndarray:
        return (np.arange(self.bins) + 0.5) / self.bins


@dataclass(frozen=True, eq=False)
class UlamBound:
    """
    value: dual-certified upper bound of the LP optimum
    solver_value: the optimum HiGHS reported
    error: Lip(φ)/bins
    """

    value: float
    error: float
    solver_value: float
    bin_mass: np.ndarray
    flow: np.ndarray
    model: UlamModel

    @property
    def upper(self) -> float:
        return self.value + self.error


def _lift_ranges(f: PLMap, bins: int):
    """Per-bin min/max of the lift, from bin edges and interior breakpoints."""
    values = np.asarray(f.lift(np.arange(bins + 1) / bins))
    lo = np.minimum(values[:-1], values[1:])
    hi = np.maximum(values[:-1], values[1:])
    inner = f.breakpoints[1:-1]
    if inner.size:
        owner = np.minimum((inner * bins).astype(int), bins - 1)
        lifted = np.asarray(f.lift(inner))
        np.minimum.at(lo, owner, lifted)
        np.maximum.at(hi, owner, lifted)
    return lo, hi


def _enclosure_edges(f: PLMap, bins: int):
    lo, hi = _lift_ranges(f, bins)
    first = np.floor((lo - EDGE_SLACK) * bins).astype(int)
    last = np.floor((hi + EDGE_SLACK) * bins).astype(int)
    counts = np.minimum(last - first + 1, bins)
    sources = np.repeat(np.arange(bins), counts)
    starts = np.repeat(first, counts)
    steps = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    targets = np.mod(starts + steps, bins)
    return sources, targets


def _fractions(f: PLMap, bins: int) -> sparse.csr_matrix:
    offsets = (np.arange(SUBSAMPLES) + 0.5) / (SUBSAMPLES * bins)
    points = (np.arange(bins)[:, None] / bins + offsets[None, :]).ravel()
    rows = np.repeat(np.arange(bins), SUBSAMPLES)
    cols = np.minimum((np.asarray(f(points)) * bins).astype(int), bins - 1)
    data = np.full(len(points), 1.0 / SUBSAMPLES)
    return sparse.coo_matrix((data, (rows, cols)), shape=(bins, bins)).tocsr()


def certified_value(model: UlamModel, dual: np.ndarray) -> float:
    """
    max over edges s → t of binMax[s] + y[t] − y[s], rounded up.

    For every bin potential y the y terms telescope along a circulation, so
    this is an upper bound of the LP optimum whatever the solver tolerances
    were. The near-maximal edges are summed in Fraction arithmetic.
    """
    potential = model.bin_potential
    slack = potential[model.sources] + dual[model.targets] - dual[model.sources]
    top = np.flatnonzero(slack >= slack.max() - EXACT_BAND)
    exact = max(
        Fraction(float(potential[s])) + Fraction(float(dual[t])) - Fraction(float(dual[s]))
        for s, t in zip(model.sources[top].tolist(), model.targets[top].tolist())
    )
    value = float(exact)
    if Fraction(value) < exact:
        value = math.nextafter(value, math.inf)
    return value


def _duals(res, bins: int) -> np.ndarray:
    marginals = getattr(getattr(res, "eqlin", None), "marginals", None)
    if marginals is None:
        logger.warning("HiGHS 가 쌍대 값을 돌려주지 않아 y = 0 으로 인증합니다.")
        return np.zeros(bins)
    return np.asarray(marginals[:bins], dtype=float)


def build_ulam_model(f: PLMap, phi: Potential, bins: int) -> UlamModel:
    if bins < 16:
        raise ValueError("bins 는 16 이상이어야 합니다.")
    sources, targets = _enclosure_edges(f, bins)
    model = UlamModel(bins, _fractions(f, bins), phi.bin_maxima(bins), sources, targets)
    logger.debug("Ulam model: bins=%d edges=%d", bins, model.edges)
    return model


def ulam_upper_bound(f: PLMap, phi: Potential, bins: int) -> UlamBound:
    """
    maximize Σ_e ν_e·binMax[src e]  s.t.  ν ≥ 0, Σν = 1, inflow = outflow per bin.

    The value is certified from the HiGHS duals (both signs tried, the smaller
    kept) rather than taken from the float optimum. The error Lip(φ)/bins is the
    oscillation of φ on a bin.
    """
    model = build_ulam_model(f, phi, bins)
    m = model.edges
    cols = np.arange(m)
    balance = sparse.coo_matrix(
        (
            np.concatenate([np.ones(m), -np.ones(m)]),
            (np.concatenate([model.targets, model.sources]), np.concatenate([cols, cols])),
        ),
        shape=(bins, m),
    )
    total = sparse.coo_matrix(np.ones((1, m)))
    a_eq = sparse.vstack([balance, total]).tocsr()
    b_eq = np.concatenate([np.zeros(bins), [1.0]])
    res = linprog(
        -model.bin_potential[model.sources],
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs",
    )
    if res.status != 0:
        raise LPInfeasible(f"Ulam LP 실패 (status={res.status}): {res.message}")

    flow = np.maximum(res.x, 0.0)
    mass = np.bincount(model.sources, weights=flow, minlength=bins)
    solver_value = float(-res.fun)
    dual = _duals(res, bins)
    value = min(certified_value(model, dual), certified_value(model, -dual))
    error = phi.lipschitz / bins
    logger.info(
        "Ulam 상한 %.9f ± %.2e (HiGHS %.9f, bins=%d, edges=%d)", value, error, solver_value, bins, m
    )
    return UlamBound(value, error, solver_value, mass, flow, model)


def dump_csv(bound: UlamBound, directory) -> list:
    """Write the transition triplets and the optimal LP vector for offline inspection."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    coo = bound.model.transition.tocoo()
    transition_path = directory / "ulam_transition.csv"
    with transition_path.open("w", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["row", "col", "fraction"])
        writer.writerows(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))
    vector_path = directory / "ulam_optimum.csv"
    with vector_path.open("w", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["source", "target", "flow", "bin_potential"])
        for s, t, v in zip(bound.model.sources, bound.model.targets, bound.flow):
            writer.writerow([int(s), int(t), float(v), float(bound.model.bin_potential[s])])
    logger.info("Ulam 덤프: %s, %s", transition_path, vector_path)
    return [transition_path, vector_path]
