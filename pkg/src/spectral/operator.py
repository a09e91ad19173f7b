from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.bootstrap.errors import ConfigurationError
from src.domain.schema import DomainGrid, Lattice
from src.field.schema import GmcMeasure


@dataclass(frozen=True, eq=False)
class LiouvilleOperator:
    """Symmetrized Nystrom matrix M = D^{1/2} G D^{1/2} of the Green operator in L^2(mu)."""
    matrix: np.ndarray
    kernel: np.ndarray
    weights: np.ndarray
    lattice: Optional[Lattice] = None

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def from_kernel(cls, kernel, weights, lattice: Optional[Lattice] = None) -> "LiouvilleOperator":
        kernel = np.atleast_2d(np.asarray(kernel, dtype=float))
        weights = np.atleast_1d(np.asarray(weights, dtype=float))
        if kernel.shape != (weights.shape[0], weights.shape[0]):
            raise ConfigurationError(
                f"kernel {kernel.shape} does not match {weights.shape[0]} measure weights"
            )
        root = np.sqrt(weights)
        matrix = root[:, None] * kernel * root[None, :]
        # mirror the upper triangle so M == M.T bitwise
        matrix = np.triu(matrix) + np.triu(matrix, k=1).T
        return cls(matrix=matrix, kernel=kernel, weights=weights, lattice=lattice)


def assemble_operator(grid: DomainGrid, measure: GmcMeasure) -> LiouvilleOperator:
    if measure.size != grid.size:
        raise ConfigurationError(f"grid has {grid.size} points but measure has {measure.size} weights")
    return LiouvilleOperator.from_kernel(grid.green, measure.weights, lattice=grid)


def hs_norm(op: LiouvilleOperator) -> float:
    """sqrt(sum_ij g_ij^2 mu_i mu_j), the Hilbert-Schmidt norm of the Green operator."""
    return float(np.sqrt(op.weights @ (op.kernel ** 2) @ op.weights))
