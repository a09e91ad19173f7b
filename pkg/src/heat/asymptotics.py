"""Small-time heat-trace plateau and boundary-correction exponent."""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.bootstrap.errors import ConfigurationError
from src.field.schema import CouplingParams, GmcMeasure
from src.heat.kpz import kpz_solve
from src.heat.trace import HeatTrace
from src.spectral.eigen import LiouvilleSpectrum
from src.spectral.resolution import resolved_mass
from src.spectral.weyl import DEFAULT_WINDOW, weyl_window

MIN_TIMES = 20
NO_PLATEAU = "no plateau at this resolution"


@dataclass
class PlateauReport:
    t_star: float
    value: float
    ratio: float
    trusted_min_t: float
    # value over c_gamma mu_res(t*), the mass the lattice resolves at t*
    resolved_ratio: float = float("nan")
    flags: List[str] = field(default_factory=list)


@dataclass
class BoundaryFit:
    alpha: float
    prefactor: float
    window: Tuple[float, float]
    points_used: int
    delta: Optional[float] = None
    flags: List[str] = field(default_factory=list)

    @property
    def one_minus_delta(self) -> Optional[float]:
        return None if self.delta is None else 1.0 - self.delta


def plateau_estimate(trace: HeatTrace, spectrum: LiouvilleSpectrum, measure: GmcMeasure,
                     window_frac: Sequence[float] = DEFAULT_WINDOW, c_fit: Optional[float] = None) -> PlateauReport:
    """Flattest point of t H(t) on the grid.

    c_fit is the fitted Weyl constant that sets the resolved mass; without it, or without one
    mass per eigenvalue, resolved_ratio equals ratio.
    """
    if trace.times.shape[0] < MIN_TIMES:
        raise ConfigurationError(f"plateau estimation needs >= {MIN_TIMES} times, got {trace.times.shape[0]}")
    scaled = trace.scaled
    slope = np.gradient(scaled, np.log(trace.times))
    idx = int(np.argmin(np.abs(slope)))

    flags: List[str] = []
    signs = np.sign(slope[np.abs(slope) > 0])
    if idx in (0, len(slope) - 1) or signs.size == 0 or np.all(signs == signs[0]):
        flags.append(NO_PLATEAU)

    try:
        _, n_hi = weyl_window(spectrum.size, window_frac)
    except ConfigurationError:
        n_hi = spectrum.size
    trusted_min_t = 1.0 / spectrum.lambdas[n_hi - 1]
    t_star = float(trace.times[idx])
    if t_star < trusted_min_t:
        flags.append("plateau below trusted small-t limit")

    c_gamma = CouplingParams(gamma=measure.gamma).weyl_const
    value = float(scaled[idx])
    ratio = value / (c_gamma * measure.total)
    resolved_ratio = ratio
    if c_fit is not None and measure.size == spectrum.size:
        resolved_ratio = value / (c_gamma * float(resolved_mass(measure.weights, t_star, c_fit)[0]))
    return PlateauReport(t_star=t_star, value=value, ratio=ratio, trusted_min_t=float(trusted_min_t),
                         resolved_ratio=resolved_ratio, flags=flags)


def boundary_correction_fit(times, scaled, c_est: float, t_window: Tuple[float, float],
                            gamma: Optional[float] = None) -> BoundaryFit:
    """Log-log slope alpha of c_est - t H(t) ~ b t^alpha over t_window; c_est must exceed t H there."""
    times = np.asarray(times, dtype=float)
    scaled = np.asarray(scaled, dtype=float)
    in_window = (times >= t_window[0]) & (times <= t_window[1])
    residual = c_est - scaled[in_window]

    flags: List[str] = []
    if residual.size and c_est <= np.max(scaled[in_window]):
        flags.append("c_est not above sup of t H in window")
    positive = residual > 0.0
    if not np.all(positive):
        flags.append("nonpositive residuals in window")
    delta = kpz_solve(0.5, gamma).delta if gamma is not None else None

    if np.count_nonzero(positive) < 2:
        flags.append("too few points for a fit")
        return BoundaryFit(alpha=float("nan"), prefactor=float("nan"), window=tuple(t_window),
                           points_used=int(np.count_nonzero(positive)), delta=delta, flags=flags)

    alpha, intercept = np.polyfit(np.log(times[in_window][positive]), np.log(residual[positive]), 1)
    return BoundaryFit(alpha=float(alpha), prefactor=float(np.exp(intercept)), window=tuple(t_window),
                       points_used=int(np.count_nonzero(positive)), delta=delta, flags=flags)
