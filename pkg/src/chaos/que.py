from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from src.bootstrap.errors import ConfigurationError
from src.domain.grid import macro_cell_labels
from src.field.schema import GmcMeasure
from src.spectral.eigen import LiouvilleSpectrum
from src.spectral.weyl import DEFAULT_WINDOW, weyl_window


@dataclass(frozen=True)
class QueReport:
    n: int
    tv_distance: float
    ipr: float


def que_divergence(spectrum: LiouvilleSpectrum, measure: GmcMeasure, n: int, partition_k: int = 4) -> QueReport:
    """TV distance between |f_n|^2 mu and mu / mu(S) on a k x k partition, plus the IPR."""
    if partition_k < 2:
        raise ConfigurationError(f"partition_k must be >= 2, got {partition_k}")
    labels = macro_cell_labels(measure.lattice, partition_k)
    f = spectrum.eigfunc(n)
    mass = f ** 2 * measure.weights
    norm = mass.sum()

    cells = partition_k * partition_k
    eigen_share = np.bincount(labels, weights=mass, minlength=cells) / norm
    volume_share = np.bincount(labels, weights=measure.weights, minlength=cells) / measure.total
    tv = 0.5 * float(np.sum(np.abs(eigen_share - volume_share)))
    ipr = float(np.sum(f ** 4 * measure.weights) / norm ** 2)
    return QueReport(n=n, tv_distance=min(tv, 1.0), ipr=ipr)


def que_trend(spectrum: LiouvilleSpectrum, measure: GmcMeasure, window_frac: Sequence[float] = DEFAULT_WINDOW,
              partition_k: int = 4, blocks: int = 5) -> Tuple[List[QueReport], List[Tuple[int, float]]]:
    """Per-index reports over the bulk window and the median TV distance per block of indices."""
    n_lo, n_hi = weyl_window(spectrum.size, window_frac)
    reports = [que_divergence(spectrum, measure, n, partition_k) for n in range(n_lo, n_hi + 1)]
    medians = []
    for block in np.array_split(np.arange(len(reports)), blocks):
        if block.size:
            medians.append((reports[int(block[block.size // 2])].n,
                            float(np.median([reports[b].tv_distance for b in block]))))
    return reports, medians
