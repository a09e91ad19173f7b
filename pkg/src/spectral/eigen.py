import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from src.bootstrap.errors import OperatorNotPositiveError
from src.bootstrap.logger import get_logger
from src.bootstrap.settings import get_settings
from src.domain.schema import Lattice
from src.spectral.operator import LiouvilleOperator

logger = get_logger("spectral.eigen")

NEGATIVE_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class LiouvilleSpectrum:
    """Ascending eigenvalues lambda_n = 1/mu_n and eigenfunction values f_n(x_i).

    eigfuncs[:, n-1] holds f_n; it is None for spectra loaded from CSV.
    """
    lambdas: np.ndarray
    eigfuncs: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    lattice: Optional[Lattice] = None

    @property
    def size(self) -> int:
        return int(self.lambdas.shape[0])

    @property
    def mu_n(self) -> np.ndarray:
        return 1.0 / self.lambdas

    def eigfunc(self, n: int) -> np.ndarray:
        return self.eigfuncs[:, n - 1]


def eigendecompose(op: LiouvilleOperator, driver: Optional[str] = None) -> LiouvilleSpectrum:
    start_time = time.time()
    driver = driver or get_settings().eigh_driver
    values, vectors = linalg.eigh(op.matrix, driver=driver, check_finite=False)
    values = values[::-1]
    vectors = vectors[:, ::-1]

    threshold = NEGATIVE_TOLERANCE * np.linalg.norm(op.matrix, "fro")
    if values[-1] < -threshold:
        worst = int(np.argmin(values))
        raise OperatorNotPositiveError(index=worst + 1, value=float(values[worst]), threshold=threshold)

    keep = values > 0.0
    clamped = int(np.count_nonzero(~keep))
    if clamped:
        logger.warning(f"Clamped {clamped} eigenvalue(s) in [-{threshold:.2e}, 0] out of the spectrum")
    values = values[keep]
    vectors = vectors[:, keep]

    # largest-magnitude component positive; argmax picks the lowest index on ties
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    vectors = vectors * signs[None, :]

    eigfuncs = vectors / np.sqrt(op.weights)[:, None]
    logger.info(f"Eigendecomposed P={op.size} operator ({clamped} clamped) in {time.time() - start_time:.2f}s")
    return LiouvilleSpectrum(lambdas=1.0 / values, eigfuncs=eigfuncs, weights=op.weights, lattice=op.lattice)


def eigfun_smoothing_residual(spectrum: LiouvilleSpectrum, op: LiouvilleOperator, n: int) -> float:
    """max_i |f_n(x_i) - lambda_n sum_j g_ij f_n(x_j) mu_j|"""
    f = spectrum.eigfunc(n)
    smoothed = spectrum.lambdas[n - 1] * (op.kernel @ (f * op.weights))
    return float(np.max(np.abs(f - smoothed)))


def counting_function(spectrum: LiouvilleSpectrum, lam) -> int:
    return int(np.searchsorted(spectrum.lambdas, lam, side="right"))


def orthonormality_error(spectrum: LiouvilleSpectrum) -> float:
    gram = spectrum.eigfuncs.T @ (spectrum.eigfuncs * spectrum.weights[:, None])
    return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


def inverse_square_sum_error(spectrum: LiouvilleSpectrum, op: LiouvilleOperator) -> float:
    """Relative gap between sum_n lambda_n^-2 and ||M||_F^2."""
    frobenius_sq = float(np.sum(op.matrix ** 2))
    return abs(float(np.sum(spectrum.lambdas ** -2.0)) - frobenius_sq) / frobenius_sq
