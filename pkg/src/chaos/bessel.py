"""Bessel utilities backed by scipy.special."""
import numpy as np
from scipy import special

from src.bootstrap.errors import DomainError

FIRST_J0_ZERO = 2.404825557695773


def bessel_j0(r):
    """J_0(r) for r >= 0 (scalar or array)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0.0):
        raise DomainError(f"bessel_j0 needs r >= 0, got min {r_arr.min()}")
    value = special.j0(r_arr)
    return float(value) if value.ndim == 0 else value


def bessel_jv(order: float, r):
    return special.jv(order, np.asarray(r, dtype=float))


def bessel_zeros(order: int, count: int) -> np.ndarray:
    """First `count` positive zeros of J_order."""
    if count < 1:
        return np.empty(0)
    return special.jn_zeros(int(order), int(count))
