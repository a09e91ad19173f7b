from dataclasses import dataclass

import numpy as np

from src.bootstrap.errors import DomainError


@dataclass(frozen=True)
class KpzExponents:
    euclid_x: float
    gamma: float
    delta: float

    @property
    def boundary_coupling(self) -> float:
        """gamma (1 - Delta), the coupling of the fractional boundary length."""
        return self.gamma * (1.0 - self.delta)


def kpz_solve(x: float, gamma: float) -> KpzExponents:
    """Root in [0, 1] of (gamma^2/4) D^2 + (1 - gamma^2/4) D - x = 0."""
    if not 0.0 <= gamma < 2.0:
        raise DomainError(f"gamma must lie in [0, 2), got {gamma}")
    if not 0.0 < x <= 1.0:
        raise DomainError(f"x must lie in (0, 1], got {x}")
    a = gamma ** 2 / 4.0
    b = 1.0 - a
    # rationalized positive root, no cancellation for small a
    delta = 2.0 * x / (b + np.sqrt(b * b + 4.0 * a * x))
    if not -1e-12 <= delta <= 1.0 + 1e-12:
        raise DomainError(f"no KPZ root in [0, 1] for x={x}, gamma={gamma}")
    return KpzExponents(euclid_x=float(x), gamma=float(gamma), delta=float(min(max(delta, 0.0), 1.0)))
