"""field -> gmc -> operator -> spectrum for one replica."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.bootstrap.logger import get_logger
from src.domain.schema import DomainGrid
from src.field.gff import sample_gff
from src.field.gmc import gmc_weights
from src.field.schema import CouplingParams, CovarianceModel, FieldSample, GmcMeasure
from src.spectral.eigen import LiouvilleSpectrum, eigendecompose
from src.spectral.operator import LiouvilleOperator, assemble_operator

logger = get_logger("spectral.pipeline")


@dataclass(frozen=True, eq=False)
class Replica:
    index: int
    seed: int
    field: Optional[FieldSample]
    measure: GmcMeasure
    operator: LiouvilleOperator
    spectrum: LiouvilleSpectrum


def build_replica(model: CovarianceModel, params: CouplingParams, seed: int, index: int = 0) -> Replica:
    field = sample_gff(model, seed)
    measure = gmc_weights(field, params)
    operator = assemble_operator(model.grid, measure)
    spectrum = eigendecompose(operator)
    logger.debug(f"Replica {index} (seed={seed}): mu_total={measure.total:.5g}, lambda_1={spectrum.lambdas[0]:.5g}")
    return Replica(index=index, seed=seed, field=field, measure=measure, operator=operator, spectrum=spectrum)


def replica_from_weights(grid: DomainGrid, weights, gamma: float, seed: int = -1, index: int = 0) -> Replica:
    """Rebuild operator and spectrum from stored measure weights (no field draw)."""
    measure = GmcMeasure(weights=np.asarray(weights, dtype=float), gamma=gamma, lattice=grid)
    operator = assemble_operator(grid, measure)
    spectrum = eigendecompose(operator)
    return Replica(index=index, seed=seed, field=None, measure=measure, operator=operator, spectrum=spectrum)
