from dataclasses import dataclass, field
from typing import List, Literal, Optional

import numpy as np
from scipy import special

from src.bootstrap.errors import ConfigurationError

# (lambda, t) probes for each regime
REGIME_PROBES = {"zero": (1e3, 1e-3), "infinity": (1e-3, 1e3)}
TAIL_TOLERANCE = 1e-8


@dataclass
class KaramataReport:
    laplace_limit: float
    counting_limit: float
    relative_gap: float
    flags: List[str] = field(default_factory=list)


def karamata_check(locations, masses, rho: float, regime: Literal["zero", "infinity"] = "zero",
                   lam: Optional[float] = None, t: Optional[float] = None) -> KaramataReport:
    """Compare lam^rho * Laplace(nu)(lam) with t^-rho * nu([0, t]) * Gamma(1 + rho) (L == 1).

    regime "zero" probes atoms near 0 (lam large, t small); "infinity" the
    opposite, which is the one relevant for eigenvalue counting measures.
    """
    if rho < 0:
        raise ConfigurationError(f"rho must be >= 0, got {rho}")
    default_lam, default_t = REGIME_PROBES[regime]
    lam = default_lam if lam is None else lam
    t = default_t if t is None else t
    locations = np.asarray(locations, dtype=float)
    masses = np.broadcast_to(np.asarray(masses, dtype=float), locations.shape)

    terms = masses * np.exp(-lam * locations)
    laplace = lam ** rho * float(np.sum(terms))

    flags: List[str] = []
    if locations.size > 1:
        last = int(np.argmax(locations))
        if terms[last] > TAIL_TOLERANCE * np.sum(terms):
            flags.append("laplace tail not converged")
        if locations[last] < t:
            flags.append("counting window extends past the last atom")

    counting = t ** (-rho) * float(np.sum(masses[locations <= t]))
    expected = laplace / special.gamma(1.0 + rho)
    gap = abs(counting - expected) / abs(expected) if expected != 0.0 else float("inf")
    return KaramataReport(laplace_limit=laplace, counting_limit=counting, relative_gap=gap, flags=flags)
