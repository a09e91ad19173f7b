"""Local autocorrelation of eigenfunctions against Berry's J_0 random-wave covariance."""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from src.bootstrap.errors import ConfigurationError
from src.bootstrap.logger import get_logger
from src.chaos.bessel import FIRST_J0_ZERO, bessel_j0
from src.field.schema import GmcMeasure
from src.spectral.eigen import LiouvilleSpectrum

logger = get_logger("chaos.berry")

MAX_RADIUS = 0.2
MIN_PAIRS = 8


@dataclass
class BerryReport:
    n: int
    center: np.ndarray
    radii: np.ndarray
    profile: np.ndarray
    kept: np.ndarray
    k_n: float
    misfit: float
    flags: List[str] = field(default_factory=list)

    @property
    def j0_fit(self) -> np.ndarray:
        return bessel_j0(self.k_n * self.radii)


def window_superposition(spectrum: LiouvilleSpectrum, n: int, omega: float, seed: int) -> np.ndarray:
    """sum_k X_k f_k over lambda_n <= lambda_k <= lambda_n + omega, unit L^2(mu) norm."""
    lam = spectrum.lambdas[n - 1]
    band = np.flatnonzero((spectrum.lambdas >= lam) & (spectrum.lambdas <= lam + omega))
    coeffs = np.random.default_rng(seed).standard_normal(band.size)
    return spectrum.eigfuncs[:, band] @ coeffs / np.sqrt(np.sum(coeffs ** 2))


def _first_zero(radii: np.ndarray, profile: np.ndarray) -> Optional[float]:
    for a in range(len(radii) - 1):
        if profile[a] > 0.0 >= profile[a + 1]:
            return radii[a] + profile[a] * (radii[a + 1] - radii[a]) / (profile[a] - profile[a + 1])
    return None


def berry_autocorr(spectrum: LiouvilleSpectrum, measure: GmcMeasure, n: int, radii: Sequence[float],
                   center=None, seed: int = 0, patch_radius: float = 0.25,
                   values: Optional[np.ndarray] = None) -> BerryReport:
    lattice = measure.lattice
    if lattice is None:
        raise ConfigurationError("berry_autocorr needs a measure attached to a lattice")
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= lattice.mesh) or np.any(radii > MAX_RADIUS):
        raise ConfigurationError(f"radii must lie in ({lattice.mesh:g}, {MAX_RADIUS}]")

    points = lattice.points
    if center is None:
        rng = np.random.default_rng(seed)
        center = points[rng.choice(measure.size, p=measure.weights / measure.total)]
    center = np.asarray(center, dtype=float)
    f = spectrum.eigfunc(n) if values is None else np.asarray(values, dtype=float)

    patch = np.flatnonzero(np.hypot(*(points - center).T) <= patch_radius)
    half_bin = 0.5 * lattice.mesh
    tree = cKDTree(points)
    neighbours = tree.query_ball_point(points[patch], r=float(radii.max() + half_bin))
    left = np.repeat(patch, [len(idx) for idx in neighbours])
    right = np.concatenate([np.asarray(idx, dtype=np.int64) for idx in neighbours])
    distance = np.hypot(*(points[left] - points[right]).T)
    products = f[left] * f[right]
    scale = np.mean(f[patch] ** 2)

    profile = np.full(radii.shape, np.nan)
    kept = np.zeros(radii.shape, dtype=bool)
    flags: List[str] = []
    for b, radius in enumerate(radii):
        in_bin = np.abs(distance - radius) < half_bin
        if np.count_nonzero(in_bin) < MIN_PAIRS:
            flags.append(f"bin r={radius:.4g} dropped: {np.count_nonzero(in_bin)} pairs")
            continue
        profile[b] = products[in_bin].mean() / scale
        kept[b] = True

    zero = _first_zero(radii[kept], profile[kept])
    if zero is not None:
        k_n = FIRST_J0_ZERO / zero
    else:
        # local Weyl scale: -1/2 Laplacian eigenvalue lambda times the local density
        nearest = int(np.argmin(np.hypot(*(points - center).T)))
        density = measure.weights[nearest] / lattice.cell_area
        k_n = float(np.sqrt(2.0 * spectrum.lambdas[n - 1] * density))
        flags.append("no zero crossing in radii; wavenumber from local Weyl scale")

    misfit = float(np.sqrt(np.mean((profile[kept] - bessel_j0(k_n * radii[kept])) ** 2))) if kept.any() else float("nan")
    if flags:
        logger.warning(f"Berry autocorrelation n={n}: {'; '.join(flags)}")
    return BerryReport(n=n, center=center, radii=radii, profile=profile, kept=kept,
                       k_n=float(k_n), misfit=misfit, flags=flags)
