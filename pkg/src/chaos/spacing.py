"""Nearest-neighbour spacing statistics against the GOE (Wigner surmise) and Poisson laws."""
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy import linalg, stats

from src.bootstrap.errors import ConfigurationError, DomainError
from src.field.schema import CouplingParams, GmcMeasure
from src.spectral.eigen import LiouvilleSpectrum
from src.spectral.resolution import resolved_count, resolved_levels
from src.spectral.weyl import DEFAULT_WINDOW, weyl_window

MIN_SPACING_EIGENVALUES = 100
SURMISE_NOTE = "GOE spacing law approximated by the Wigner surmise"


def wigner_surmise_cdf(s):
    """1 - exp(-pi s^2 / 4)"""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0.0):
        raise DomainError("spacing must be nonnegative")
    value = -np.expm1(-np.pi * s_arr ** 2 / 4.0)
    return float(value) if value.ndim == 0 else value


def wigner_surmise_pdf(s):
    s = np.asarray(s, dtype=float)
    return 0.5 * np.pi * s * np.exp(-np.pi * s ** 2 / 4.0)


def poisson_cdf(s):
    return -np.expm1(-np.asarray(s, dtype=float))


def ks_distance(samples, cdf: Callable) -> float:
    samples = np.atleast_1d(np.asarray(samples, dtype=float))
    if samples.size == 0:
        raise ConfigurationError("ks_distance needs at least one sample")
    return float(stats.kstest(samples, cdf).statistic)


@dataclass(frozen=True, eq=False)
class SpacingStats:
    gaps: np.ndarray
    ks_goe: float
    ks_poisson: float
    mean_gap: float
    window: Tuple[int, int]
    note: str = SURMISE_NOTE


def spacing_stats(gaps: np.ndarray, window: Tuple[int, int] = (0, 0)) -> SpacingStats:
    gaps = np.asarray(gaps, dtype=float)
    return SpacingStats(gaps=gaps, ks_goe=ks_distance(gaps, wigner_surmise_cdf),
                        ks_poisson=ks_distance(gaps, poisson_cdf), mean_gap=float(np.mean(gaps)), window=window)


def unfold_gaps(spectrum: LiouvilleSpectrum, params: CouplingParams, measure: GmcMeasure,
                window_frac: Sequence[float] = DEFAULT_WINDOW) -> SpacingStats:
    """Gaps s_j = m(lambda_{j+1}) - m(lambda_j) over the bulk window, m the resolved count at c_gamma.

    Without one mass per level this is c_gamma mu(S) (lambda_{j+1} - lambda_j).
    """
    n_lo, n_hi = weyl_window(spectrum.size, window_frac)
    if n_hi - n_lo + 1 < MIN_SPACING_EIGENVALUES:
        raise ConfigurationError(
            f"spacing window [{n_lo}, {n_hi}] holds fewer than {MIN_SPACING_EIGENVALUES} eigenvalues"
        )
    levels = spectrum.lambdas[n_lo - 1:n_hi]
    if measure.size == spectrum.size:
        gaps = np.diff(resolved_count(measure.weights, levels, params.weyl_const))
    else:
        gaps = params.weyl_const * measure.total * np.diff(levels)
    return spacing_stats(gaps, (n_lo, n_hi))


def sample_poisson_spectrum(measure: GmcMeasure, params: CouplingParams, seed: int) -> np.ndarray:
    """Unit-mean exponential gaps in the unfolded variable, mapped back through the resolved count.

    For uniform masses the levels are the plain cumulative sums divided by c_gamma mu(S).
    """
    rng = np.random.default_rng(seed)
    unfolded = np.cumsum(rng.exponential(1.0, measure.size))
    return resolved_levels(measure.weights, unfolded, params.weyl_const)


def _semicircle_count(x: np.ndarray, size: int) -> np.ndarray:
    radius = np.sqrt(2.0 * size)
    x = np.clip(x, -radius, radius)
    area = x * np.sqrt(radius ** 2 - x ** 2) + radius ** 2 * np.arcsin(x / radius)
    return size * (0.5 + area / (np.pi * radius ** 2))


def goe_control_gaps(size: int = 400, matrices: int = 10, seed: int = 0, bulk_frac: float = 0.5) -> np.ndarray:
    """Bulk spacings of GOE matrices unfolded with the semicircle counting function."""
    rng = np.random.default_rng(seed)
    lo = int(size * (1.0 - bulk_frac) / 2.0)
    hi = size - lo
    gaps = []
    for _ in range(matrices):
        a = rng.standard_normal((size, size))
        levels = linalg.eigvalsh((a + a.T) / 2.0)
        unfolded = _semicircle_count(levels, size)
        gaps.append(np.diff(unfolded[lo:hi]))
    return np.concatenate(gaps)
