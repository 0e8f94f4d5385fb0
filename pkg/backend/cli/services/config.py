from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters; built only by RunConfigSerializer."""

    map_path: str
    epsilon: float
    grid: int
    bins: int
    horizon_factor: int
    tol: float
    eta: float
    seed: int
    output_dir: str
    min_slope: float
    branch_cap: int
    random_orbits: int
    orbit_length: int
    retries: int
    p_max: int
    potential_path: Optional[str] = None
    plan_path: Optional[str] = None

    @property
    def out(self) -> Path:
        return Path(self.output_dir)

    def with_epsilon(self, epsilon: float, output_dir: str) -> "RunConfig":
        return replace(self, epsilon=epsilon, output_dir=output_dir)
