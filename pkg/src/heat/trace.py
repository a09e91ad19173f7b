"""Heat trace and spectral heat kernel p_t(x, y) = sum_n e^{-lambda_n t} f_n(x) f_n(y)."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.bootstrap.errors import DomainError
from src.domain.grid import get_domain
from src.domain.schema import DomainSpec
from src.spectral.eigen import LiouvilleSpectrum


@dataclass(frozen=True, eq=False)
class HeatTrace:
    times: np.ndarray
    values: np.ndarray

    @property
    def scaled(self) -> np.ndarray:
        return self.times * self.values


def _positive_times(times) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times <= 0.0):
        raise DomainError("heat-trace times must be positive")
    return times


def log_time_grid(t_max: float, decades: float, points_per_decade: int) -> np.ndarray:
    count = max(2, int(round(decades * points_per_decade)) + 1)
    return np.logspace(np.log10(t_max) - decades, np.log10(t_max), count)


def heat_trace(spectrum: LiouvilleSpectrum, times) -> HeatTrace:
    times = _positive_times(times)
    # smallest terms first
    exponents = np.outer(times, spectrum.lambdas[::-1])
    return HeatTrace(times=times, values=np.exp(-exponents).sum(axis=1))


def spectral_heat_kernel(spectrum: LiouvilleSpectrum, t: float, i: int, j: int) -> float:
    decay = np.exp(-spectrum.lambdas * _positive_times(t)[0])
    return float(np.sum(decay * spectrum.eigfuncs[i] * spectrum.eigfuncs[j]))


def heat_kernel_matrix(spectrum: LiouvilleSpectrum, t: float) -> np.ndarray:
    decay = np.exp(-spectrum.lambdas * _positive_times(t)[0])
    return (spectrum.eigfuncs * decay[None, :]) @ spectrum.eigfuncs.T


def heat_kernel_diagonal(spectrum: LiouvilleSpectrum, t: float) -> np.ndarray:
    decay = np.exp(-spectrum.lambdas * _positive_times(t)[0])
    return (spectrum.eigfuncs ** 2) @ decay


def subprobability_check(spectrum: LiouvilleSpectrum, t: float) -> float:
    """max_i sum_j p_t(x_i, x_j) mu_j"""
    decay = np.exp(-spectrum.lambdas * _positive_times(t)[0])
    mass = spectrum.eigfuncs @ (decay * (spectrum.eigfuncs.T @ spectrum.weights))
    return float(np.max(mass))


def local_heat_trace(spectrum: LiouvilleSpectrum, t: float, mask: Optional[np.ndarray] = None) -> float:
    """H_A(t) = sum_{i in A} p_t(x_i, x_i) mu_i"""
    diag = heat_kernel_diagonal(spectrum, t) * spectrum.weights
    return float(diag.sum() if mask is None else diag[mask].sum())


def trace_consistency(spectrum: LiouvilleSpectrum, t: float) -> float:
    """Relative gap between the eigenvalue sum and the kernel-diagonal integral."""
    direct = heat_trace(spectrum, [t]).values[0]
    return abs(direct - local_heat_trace(spectrum, t)) / direct


def classical_heat_trace_expansion(spec: DomainSpec, times) -> np.ndarray:
    """|S|/(2 pi t) - |dS| / (8 sqrt(pi t / 2)) for -1/2 Laplacian with Dirichlet walls."""
    times = _positive_times(times)
    domain = get_domain(spec)
    return domain.area / (2.0 * np.pi * times) - domain.perimeter / (8.0 * np.sqrt(np.pi * times / 2.0))


def semigroup_defect(spectrum: LiouvilleSpectrum, probes: int, seed: int) -> float:
    """Worst relative defect of p_t * p_s = p_{t+s} over random (t, s, i, j) probes."""
    rng = np.random.default_rng(seed)
    lam_mid = float(np.median(spectrum.lambdas))
    worst = 0.0
    for _ in range(probes):
        t, s = rng.uniform(0.2, 5.0, size=2) / lam_mid
        i, j = rng.integers(0, spectrum.eigfuncs.shape[0], size=2)
        row_t = (spectrum.eigfuncs[i] * np.exp(-spectrum.lambdas * t)) @ spectrum.eigfuncs.T
        col_s = spectrum.eigfuncs @ (np.exp(-spectrum.lambdas * s) * spectrum.eigfuncs[j])
        composed = float(np.sum(row_t * col_s * spectrum.weights))
        direct = spectral_heat_kernel(spectrum, t + s, i, j)
        scale = np.sqrt(spectral_heat_kernel(spectrum, t + s, i, i) * spectral_heat_kernel(spectrum, t + s, j, j))
        worst = max(worst, abs(composed - direct) / scale)
    return worst
