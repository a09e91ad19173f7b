"""Weyl-law estimation and the classical (gamma = 0) reference spectra."""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.bootstrap.errors import ConfigurationError
from src.chaos.bessel import bessel_zeros
from src.domain.schema import DomainKind, DomainSpec
from src.field.schema import CouplingParams, GmcMeasure
from src.spectral.eigen import LiouvilleSpectrum
from src.spectral.resolution import fit_resolved_slope, resolved_fraction

DEFAULT_WINDOW = (0.02, 0.20)
MIN_WINDOW = 10


@dataclass(frozen=True)
class WeylFit:
    window: Tuple[int, int]
    slope: float
    discrepancy: float
    polya_fraction: float
    target: float
    berezin_fraction: float
    courant_ratio: float
    min_relative_gap: float
    # c fitted to the lattice-saturated count m(lambda; c); equals slope when nothing saturates
    resolved_slope: float
    resolved_fraction: float

    @property
    def relative_error(self) -> float:
        return abs(self.slope - self.target) / self.target

    @property
    def resolved_error(self) -> float:
        return abs(self.resolved_slope - self.target) / self.target


def weyl_window(size: int, window_frac: Sequence[float] = DEFAULT_WINDOW) -> Tuple[int, int]:
    lo, hi = window_frac
    if not 0.0 <= lo < hi <= 1.0:
        raise ConfigurationError(f"window_frac must satisfy 0 <= lo < hi <= 1, got {window_frac}")
    n_lo = max(1, int(np.ceil(lo * size - 1e-9)))
    n_hi = min(size, int(np.floor(hi * size + 1e-9)))
    if n_hi - n_lo + 1 < MIN_WINDOW:
        raise ConfigurationError(
            f"window [{n_lo}, {n_hi}] of {size} eigenvalues has fewer than {MIN_WINDOW} indices"
        )
    return n_lo, n_hi


def weyl_fit(spectrum: LiouvilleSpectrum, measure: GmcMeasure,
             window_frac: Sequence[float] = DEFAULT_WINDOW) -> WeylFit:
    n_lo, n_hi = weyl_window(spectrum.size, window_frac)
    target = CouplingParams(gamma=measure.gamma).weyl_const
    lambdas = spectrum.lambdas
    window = lambdas[n_lo - 1:n_hi]

    counts = np.searchsorted(lambdas, window, side="right").astype(float)
    x = window * measure.total
    slope = float(np.dot(x, counts) / np.dot(x, x))

    index = np.arange(n_lo, n_hi + 1)
    partial_sums = np.cumsum(lambdas)[n_lo - 1:n_hi]
    relative_gaps = np.diff(window) / window[:-1]

    # the saturation model needs one mass per eigenvalue
    if measure.size == spectrum.size:
        resolved = fit_resolved_slope(window, counts, measure.weights, slope)
        fraction = resolved_fraction(measure.weights, float(window[-1]), resolved)
    else:
        resolved, fraction = slope, 1.0

    return WeylFit(
        window=(n_lo, n_hi),
        slope=slope,
        discrepancy=float(np.max(np.abs(counts - slope * x))),
        polya_fraction=float(np.mean(counts <= target * x)),
        target=target,
        berezin_fraction=float(np.mean(partial_sums >= index ** 2 / (2.0 * target * measure.total))),
        courant_ratio=float(np.max(np.abs(counts - target * x) / np.sqrt(x))),
        min_relative_gap=float(np.min(relative_gaps)),
        resolved_slope=resolved,
        resolved_fraction=fraction,
    )


def counting_variance(spectra: Sequence[LiouvilleSpectrum], probes: Sequence[float]):
    """Ensemble mean and variance of N(lambda) at each probe value."""
    counts = np.array([[np.searchsorted(s.lambdas, p, side="right") for p in probes] for s in spectra], dtype=float)
    ddof = 1 if counts.shape[0] > 1 else 0
    return counts.mean(axis=0), counts.var(axis=0, ddof=ddof)


def _square_reference(count: int) -> np.ndarray:
    modes = np.arange(1, int(np.ceil(2.0 * np.sqrt(count))) + 3)
    values = 0.5 * np.pi ** 2 * (modes[:, None] ** 2 + modes[None, :] ** 2)
    return np.sort(values.ravel())[:count]


def _disc_reference(count: int) -> np.ndarray:
    # N(lambda) ~ lambda / 2 on the unit disc
    lam_max = 2.6 * count + 50.0
    while True:
        j_max = np.sqrt(2.0 * lam_max)
        values = []
        order = 0
        while order < j_max:
            zeros = bessel_zeros(order, int(j_max / np.pi) + 2)
            zeros = zeros[zeros < j_max]
            if zeros.size == 0:
                break
            multiplicity = 1 if order == 0 else 2
            values.extend(np.repeat(zeros ** 2 / 2.0, multiplicity))
            order += 1
        if len(values) >= count:
            return np.sort(np.asarray(values))[:count]
        lam_max *= 2.0


def classical_reference_spectrum(spec: DomainSpec, count: int) -> np.ndarray:
    """Ascending Dirichlet eigenvalues of -1/2 Laplacian, with multiplicity."""
    if count < 1:
        raise ConfigurationError(f"count must be >= 1, got {count}")
    if spec.kind == DomainKind.UNIT_SQUARE:
        return _square_reference(count)
    return _disc_reference(count)
