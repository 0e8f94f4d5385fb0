"""
명령 공통 실행 흐름
Why: pipeline/sweep 이 개별 명령과 같은 단계를 같은 인자로 밟도록 한다
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from certify.services.certificate import Certificate, certify
from certify.services.report import emit_report
from circle.services.approximation import SampledMap, pl_approximate
from circle.services.geometry import circle_distance
from circle.services.pl_map import PLMap, c0_distance
from circle.services.potential import Potential
from measure.services.bounds import MaximizingBound, maximizing_bound
from perturb.services.pipeline import ConstructionResult, construct
from perturb.services.plan import PerturbationPlan, compose

from .config import RunConfig
from .loading import load_map, load_plan, load_potential, write_json

logger = logging.getLogger(__name__)

# approximate 가 쓰는 ε 의 몫; 나머지는 섭동 몫
APPROXIMATION_SHARE = 0.5


@dataclass(frozen=True)
class PreparedMap:
    """
    f: PL map with finite preimages
    deviation: C0 distance (or sample deviation) from the input map
    budget: the part of ε left for the perturbation
    """

    f: PLMap
    deviation: float
    budget: float
    approximated: bool = False


def approximate(raw: Union[PLMap, SampledMap], config: RunConfig) -> PreparedMap:
    """
    Pass PL maps without flat pieces through; approximate everything else
    with ε/2 so the perturbation keeps the other half.
    """
    if isinstance(raw, PLMap) and raw.has_finite_preimages:
        return PreparedMap(raw, 0.0, config.epsilon)
    share = APPROXIMATION_SHARE * config.epsilon
    if isinstance(raw, PLMap):
        sampled = SampledMap.from_map(raw, config.grid, max(raw.max_abs_slope, 1.0))
        f = pl_approximate(sampled, share, config.min_slope)
        deviation = c0_distance(raw, f)
    else:
        f = pl_approximate(raw, share, config.min_slope)
        nodes = np.arange(len(raw.samples)) / len(raw.samples)
        deviation = float(np.max(circle_distance(f(nodes), raw.samples)))
    logger.info("근사: pieces=%d d=%.3e (ε=%.3e)", f.pieces, deviation, config.epsilon)
    return PreparedMap(f, deviation, config.epsilon - share, True)


def prepare(config: RunConfig):
    return approximate(load_map(config.map_path), config), load_potential(config.potential_path)


def bound_for(f: PLMap, phi0: Potential, config: RunConfig) -> MaximizingBound:
    return maximizing_bound(
        f,
        phi0,
        config.bins,
        config.p_max,
        config.branch_cap,
        config.random_orbits,
        config.orbit_length,
        config.seed,
    )


def perturbation_for(
    prepared: PreparedMap,
    phi0: Potential,
    config: RunConfig,
    bound: Optional[MaximizingBound] = None,
    verify=None,
) -> ConstructionResult:
    return construct(
        prepared.f,
        phi0,
        prepared.budget,
        config.grid,
        config.bins,
        eta=config.eta,
        horizon_factor=config.horizon_factor,
        retries=config.retries,
        p_max=config.p_max,
        branch_cap=config.branch_cap,
        random_orbits=config.random_orbits,
        orbit_length=config.orbit_length,
        seed=config.seed,
        bound=bound,
        verify=verify,
    )


def certificate_for(
    prepared: PreparedMap,
    f_hat: PLMap,
    phi0: Potential,
    plan: PerturbationPlan,
    config: RunConfig,
    base_upper_bound: Optional[float] = None,
) -> Certificate:
    return certify(
        prepared.f,
        f_hat,
        phi0,
        plan,
        prepared.budget,
        tol=config.tol,
        bins=config.bins,
        resolution=config.grid,
        seed=config.seed,
        p_max=config.p_max,
        branch_cap=config.branch_cap,
        random_orbits=config.random_orbits,
        orbit_length=config.orbit_length,
        horizon=config.horizon_factor,
        base_upper_bound=base_upper_bound,
    )


def certified_perturbation(
    prepared: PreparedMap,
    phi0: Potential,
    config: RunConfig,
    bound: Optional[MaximizingBound] = None,
) -> Tuple[ConstructionResult, Certificate]:
    """
    Construct f̂ and certify every candidate; a false verdict sends the
    construction on to the next proxy or a smaller radius.
    """
    certificates: Dict[int, Certificate] = {}

    def verify(result: ConstructionResult) -> bool:
        certificate = certificate_for(prepared, result.f_hat, phi0, result.plan, config, result.beta)
        certificates[result.attempts] = certificate
        return certificate.verdict

    result = perturbation_for(prepared, phi0, config, bound, verify)
    return result, certificates[result.attempts]


def write_perturbation(result: ConstructionResult, directory: Path):
    plan_path = write_json(result.plan.to_dict(), directory / "plan.json")
    map_path = write_json(result.f_hat.to_dict(), directory / "f_hat.json")
    return plan_path, map_path


def certify_plan(config: RunConfig, stem: str = "certificate") -> Certificate:
    """
    Certify a stored plan, or build one first when none is given.

    Why: 저장된 계획은 realize 없이 그대로 합성한다. 손상된 계획은 거짓 판정으로 드러나야 한다
    """
    prepared, phi0 = prepare(config)
    if config.plan_path:
        plan = load_plan(config.plan_path)
        f_hat = compose(prepared.f, plan.steps)
        base = plan.context.get("beta")
        certificate = certificate_for(prepared, f_hat, phi0, plan, config, base)
    else:
        result, certificate = certified_perturbation(prepared, phi0, config)
        write_perturbation(result, config.out)
    emit_report(certificate, config.out, stem)
    return certificate


def run_pipeline(config: RunConfig, stem: str = "certificate") -> Certificate:
    """approximate → maximize → perturb → certify, every artifact under config.out."""
    prepared, phi0 = prepare(config)
    out = config.out
    if prepared.approximated:
        write_json(prepared.f.to_dict(), out / "map_approx.json")
    bound = bound_for(prepared.f, phi0, config)
    write_json(bound.to_dict(), out / "bounds.json")
    result, certificate = certified_perturbation(prepared, phi0, config, bound)
    write_perturbation(result, out)
    emit_report(certificate, out, stem)
    return certificate
