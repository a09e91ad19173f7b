from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.domain.schema import DomainGrid, Lattice


class CouplingParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(default=0.0, ge=0.0, lt=2.0)

    @property
    def q_param(self) -> Optional[float]:
        """Q = 2/gamma + gamma/2; undefined at gamma = 0."""
        if self.gamma == 0.0:
            return None
        return 2.0 / self.gamma + self.gamma / 2.0

    @property
    def weyl_const(self) -> float:
        """c_gamma = 1 / (pi (2 - gamma^2/2))"""
        return 1.0 / (np.pi * (2.0 - self.gamma ** 2 / 2.0))


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    grid: DomainGrid
    cov: np.ndarray
    factor: np.ndarray
    jitter_used: float


@dataclass(frozen=True, eq=False)
class FieldSample:
    values: np.ndarray
    seed: int
    model: CovarianceModel


@dataclass(frozen=True, eq=False)
class GmcMeasure:
    """Lattice Liouville measure: one positive mass per grid point."""
    weights: np.ndarray
    gamma: float
    lattice: Optional[Lattice] = None

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    def scaled(self, factor: float) -> "GmcMeasure":
        return GmcMeasure(weights=self.weights * factor, gamma=self.gamma, lattice=self.lattice)
