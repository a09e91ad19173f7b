import time

import numpy as np
from scipy import linalg

from src.bootstrap.errors import NumericalError
from src.bootstrap.logger import get_logger
from src.domain.schema import DomainGrid
from src.field.schema import CovarianceModel

logger = get_logger("field.covariance")

# C = pi * g turns the Brownian occupation kernel into a -log|x-y| covariance
COVARIANCE_SCALE = np.pi
JITTER_LADDER = (0.0, 1e-10, 1e-8, 1e-6)


def build_covariance(grid: DomainGrid) -> CovarianceModel:
    start_time = time.time()
    cov = COVARIANCE_SCALE * grid.green
    identity = np.eye(cov.shape[0])

    for jitter in JITTER_LADDER:
        try:
            factor = linalg.cholesky(cov + jitter * identity, lower=True, check_finite=False)
        except linalg.LinAlgError:
            logger.debug(f"Cholesky failed with jitter={jitter:g}")
            continue
        if jitter > 0.0:
            logger.warning(f"Covariance factorized with diagonal jitter {jitter:g} (P={cov.shape[0]})")
        logger.info(f"Covariance factorized: P={cov.shape[0]}, jitter={jitter:g} in {time.time() - start_time:.2f}s")
        return CovarianceModel(grid=grid, cov=cov, factor=factor, jitter_used=jitter)

    lowest = linalg.eigh(cov, eigvals_only=True, subset_by_index=[0, 0])[0]
    raise NumericalError(
        f"covariance factorization failed at jitter {JITTER_LADDER[-1]:g}; most negative eigenvalue {lowest:.3e}"
    )
