from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.bootstrap.errors import ConfigurationError


class DomainKind(str, Enum):
    UNIT_DISC = "unit_disc"
    UNIT_SQUARE = "unit_square"


class DomainSpec(BaseModel):
    """Which planar domain to discretize.

    series_cutoff is the number of sine modes per axis used by the direct
    square Green series; it is ignored for the disc.
    """
    model_config = ConfigDict(frozen=True)

    kind: DomainKind = DomainKind.UNIT_DISC
    series_cutoff: int = Field(default=64, gt=0)

    @model_validator(mode="after")
    def check_cutoff(self):
        if self.kind == DomainKind.UNIT_SQUARE and self.series_cutoff < 16:
            raise ValueError("series_cutoff must be >= 16 for unit_square")
        return self


@dataclass(frozen=True, eq=False)
class Lattice:
    """Interior lattice nodes of a domain, one mesh**2 cell per node."""
    spec: DomainSpec
    n: int
    points: np.ndarray          # (P, 2)
    cell_area: float
    mesh: float
    conf_radius: np.ndarray     # (P,)
    lower: Tuple[float, float]  # bounding-box lower-left corner
    node_index: np.ndarray      # (n-1, n-1) lattice node -> point index, -1 if dropped

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    @property
    def measure_total(self) -> float:
        return self.size * self.cell_area

    def lookup(self, xy: np.ndarray) -> np.ndarray:
        """Nearest lattice node for each row of xy; -1 where the node was dropped."""
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        k = np.rint((xy - np.asarray(self.lower)) / self.mesh).astype(np.int64)
        valid = np.all((k >= 1) & (k <= self.n - 1), axis=1)
        out = np.full(xy.shape[0], -1, dtype=np.int64)
        kk = k[valid] - 1
        out[valid] = self.node_index[kk[:, 0], kk[:, 1]]
        return out


@dataclass(frozen=True, eq=False)
class DomainGrid(Lattice):
    green: np.ndarray = None    # (P, P) symmetric, regularized diagonal

    def __post_init__(self):
        if self.green is None or self.green.shape != (self.size, self.size):
            raise ConfigurationError("green matrix must be P x P")
