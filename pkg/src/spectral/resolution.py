"""Lattice resolution of the Liouville counting function.

A grid cell of mass mu_i carries at most one eigenmode, so the lattice
counting function saturates as

    m(lambda; c) = sum_i min(1, c * lambda * mu_i)

and the heat side saturates as t H(t) ~ c * sum_i mu_i (1 - exp(-t / (c mu_i))).
For uniform masses (gamma = 0) this is linear over the usual windows and
the resolved quantities coincide with the plain ones.
"""
import numpy as np
from scipy import optimize

from src.bootstrap.errors import NumericalError

MAX_BRACKET_DOUBLINGS = 64


def _positive_weights(weights) -> np.ndarray:
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1 or weights.size == 0 or np.any(weights <= 0.0):
        raise NumericalError("resolution model needs a non-empty vector of positive cell masses")
    return weights


def resolved_count(weights, lambdas, c: float) -> np.ndarray:
    """m(lambda; c) at each lambda."""
    mu = np.sort(_positive_weights(weights))
    prefix = np.concatenate([[0.0], np.cumsum(mu)])
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
    scale = c * lambdas
    # cells with c lambda mu_i < 1 still count linearly
    with np.errstate(divide="ignore"):
        light = np.searchsorted(mu, np.where(scale > 0.0, 1.0 / scale, np.inf), side="left")
    return scale * prefix[light] + (mu.size - light)


def resolved_fraction(weights, lam: float, c: float) -> float:
    """m(lambda; c) / (c lambda mu(Sigma)): share of the plain Weyl count the lattice resolves."""
    weights = _positive_weights(weights)
    return float(resolved_count(weights, lam, c)[0] / (c * lam * weights.sum()))


def resolved_mass(weights, times, c: float) -> np.ndarray:
    """mu_res(t) = sum_i mu_i (1 - exp(-t / (c mu_i)))."""
    mu = _positive_weights(weights)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    return np.array([np.sum(mu * -np.expm1(-t / (c * mu))) for t in times])


def point_resolution(mass: float, t: float, c: float) -> float:
    """1 - exp(-t / (c mu_i)): resolved share of t p_t(x_i, x_i) ~ c."""
    return float(-np.expm1(-t / (c * mass)))


def resolved_levels(weights, counts, c: float) -> np.ndarray:
    """Invert m(.; c): the lambda at which the lattice has counted each value.

    Past m = P the last linear piece is extended.
    """
    mu = np.sort(_positive_weights(weights))[::-1]
    size = mu.size
    suffix = np.concatenate([np.cumsum(mu[::-1])[::-1], [0.0]])
    ranks = np.arange(1, size + 1)
    breaks = np.maximum.accumulate(np.concatenate([[0.0], ranks + suffix[1:] / mu]))
    counts = np.asarray(counts, dtype=float)
    k = np.clip(np.searchsorted(breaks, counts, side="right") - 1, 0, size - 1)
    return (counts - k) / (c * suffix[k])


def fit_resolved_slope(window: np.ndarray, counts: np.ndarray, weights, slope: float) -> float:
    """Root in c of sum_n x_n (N(lambda_n) - m(lambda_n; c)) with x_n = lambda_n mu(Sigma).

    `slope` is the plain least-squares constant, a lower bound of the root.
    """
    weights = _positive_weights(weights)
    window = np.asarray(window, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if slope * window[-1] * weights.max() <= 1.0:
        return float(slope)
    x = window * weights.sum()

    def moment(c: float) -> float:
        return float(np.dot(x, counts - resolved_count(weights, window, c)))

    low = moment(slope)
    if low <= 0.0:
        return float(slope)
    upper = 2.0 * slope
    for _ in range(MAX_BRACKET_DOUBLINGS):
        if moment(upper) < 0.0:
            return float(optimize.brentq(moment, slope, upper, xtol=1e-12 * slope))
        upper *= 2.0
    raise NumericalError(f"resolved Weyl constant not bracketed below {upper:.3g}")

