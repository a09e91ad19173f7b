"""Experiment configuration: one JSON file with flat sections, overridable by CLI flags."""
import hashlib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from src.bootstrap.settings import get_settings
from src.domain.schema import DomainSpec


class HeatSection(BaseModel):
    decades: float = Field(default=4.0, gt=0.0, le=10.0)
    points_per_decade: int = Field(default=10, ge=5, le=100)
    # boundary fit window as multiples of the plateau time
    fit_window_factor: Tuple[float, float] = (2.0, 20.0)
    diag_replicas: int = Field(default=0, ge=0)
    diag_t: Optional[float] = Field(default=None, gt=0.0)


class MonteCarloSection(BaseModel):
    n_paths: int = Field(default=10_000, ge=2)
    n_bridges: int = Field(default=2_000, ge=2)
    dt: Optional[float] = Field(default=None, gt=0.0)
    x0: Tuple[float, float] = (0.0, 0.0)
    occupation_f: Literal["one", "macro_cell"] = "one"
    lam: Optional[float] = Field(default=None, gt=0.0)
    # None puts the smallest bridge duration at 0.01 / lam
    u_min: Optional[float] = Field(default=None, gt=0.0)
    u_max: float = Field(default=2.0, gt=0.0)
    u_points: int = Field(default=32, ge=2)


class ChaosSection(BaseModel):
    partition_k: int = Field(default=4, ge=2)
    berry_n: Optional[int] = Field(default=None, ge=1)
    berry_radii: int = Field(default=12, ge=3)
    berry_patch: float = Field(default=0.25, gt=0.0)
    superposition_omega: Optional[float] = Field(default=None, gt=0.0)
    # bulk window for the spacing statistics; None reuses window_frac
    spacing_window: Optional[Tuple[float, float]] = None

    @field_validator("spacing_window")
    @classmethod
    def check_spacing_window(cls, value):
        if value is not None and not 0.0 <= value[0] < value[1] <= 1.0:
            raise ValueError("spacing_window must satisfy 0 <= lo < hi <= 1")
        return value


class ExperimentConfig(BaseModel):
    domain: DomainSpec = DomainSpec()
    n: int = Field(default=48, ge=8, le=128)
    gamma: float = Field(default=1.0, ge=0.0, lt=2.0)
    base_seed: int = Field(default=0, ge=0)
    replicas: int = Field(default=1, ge=1)
    window_frac: Tuple[float, float] = (0.02, 0.20)
    eigenfunctions: List[int] = Field(default_factory=list)
    heat: HeatSection = HeatSection()
    mc: MonteCarloSection = MonteCarloSection()
    chaos: ChaosSection = ChaosSection()
    kpz_x: float = Field(default=0.5, gt=0.0, le=1.0)
    spectrum_path: Optional[Path] = None
    snapshot_path: Optional[Path] = None
    output_dir: Path = Field(default_factory=lambda: get_settings().output_dir)
    workers: int = Field(default_factory=lambda: get_settings().workers, ge=1)
    strict: bool = False

    @field_validator("window_frac")
    @classmethod
    def check_window(cls, value):
        lo, hi = value
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError("window_frac must satisfy 0 <= lo < hi <= 1")
        return value


# fields that never change numeric output
RUNTIME_ONLY = {"output_dir", "workers", "strict"}


def load_config(path: Optional[Path]) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    return ExperimentConfig.model_validate_json(Path(path).read_text())


def save_config(config: ExperimentConfig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.model_dump_json(indent=2))
    return path


def apply_overrides(config: ExperimentConfig, overrides: Dict[str, Any]) -> ExperimentConfig:
    """Flags win over file values; the merged config is re-validated."""
    updates = {key: value for key, value in overrides.items() if value is not None}
    return ExperimentConfig.model_validate({**config.model_dump(), **updates})


def config_hash(config: ExperimentConfig) -> str:
    canonical = config.model_dump_json(exclude=RUNTIME_ONLY)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
