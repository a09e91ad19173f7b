"""Lattice discretization of the built-in domains and Green matrix assembly."""
import time
from typing import Dict, Type

import numpy as np
from scipy import integrate

from src.bootstrap.errors import ConfigurationError
from src.bootstrap.logger import get_logger
from src.domain.base import BaseDomain
from src.domain.disc import UnitDisc
from src.domain.schema import DomainGrid, DomainKind, DomainSpec, Lattice
from src.domain.square import UnitSquare

logger = get_logger("domain.grid")

# mean of -log|u| over the unit cell [-1/2, 1/2]^2
KAPPA_0 = 0.5 * np.log(2.0) + 1.5 - 0.25 * np.pi

DOMAIN_REGISTRY: Dict[DomainKind, Type[BaseDomain]] = {
    DomainKind.UNIT_DISC: UnitDisc,
    DomainKind.UNIT_SQUARE: UnitSquare,
}


def get_domain(spec: DomainSpec) -> BaseDomain:
    domain_cls = DOMAIN_REGISTRY[spec.kind]
    if domain_cls is UnitSquare:
        return UnitSquare(series_cutoff=spec.series_cutoff)
    return domain_cls()


def cell_log_constant() -> float:
    """Quadrature value of the cell self-interaction constant (matches KAPPA_0)."""
    # eight congruent triangles 0 <= v <= u <= 1/2
    value, _ = integrate.dblquad(
        lambda v, u: -0.5 * np.log(u * u + v * v),
        0.0, 0.5,
        lambda u: 0.0, lambda u: u,
        epsabs=1e-13, epsrel=1e-12,
    )
    return 8.0 * value


def build_lattice(spec: DomainSpec, n: int) -> Lattice:
    domain = get_domain(spec)
    if n < 2:
        raise ConfigurationError(f"resolution n={n} leaves no interior point in {domain.name}")
    x_lo, y_lo, _, _ = domain.bounding_box
    mesh = domain.side() / n
    ticks = np.arange(1, n)
    grid_x, grid_y = np.meshgrid(x_lo + ticks * mesh, y_lo + ticks * mesh, indexing="ij")
    candidates = np.column_stack([grid_x.ravel(), grid_y.ravel()])

    keep = domain.contains(candidates)
    if spec.kind == DomainKind.UNIT_DISC:
        keep &= np.hypot(candidates[:, 0], candidates[:, 1]) < 1.0 - 0.5 * mesh
    if not np.any(keep):
        raise ConfigurationError(f"resolution n={n} leaves no interior point in {domain.name}")

    node_index = np.full(max(n - 1, 0) ** 2, -1, dtype=np.int64)
    node_index[keep] = np.arange(int(keep.sum()))
    points = candidates[keep]
    return Lattice(
        spec=spec,
        n=n,
        points=points,
        cell_area=mesh * mesh,
        mesh=mesh,
        conf_radius=domain.conformal_radius(points),
        lower=(x_lo, y_lo),
        node_index=node_index.reshape(n - 1, n - 1),
    )


def diagonal_regularization(spec: DomainSpec, points: np.ndarray, mesh: float) -> np.ndarray:
    """Cell-averaged self-interaction g_ii = (1/pi)(log(1/eps) + kappa_0) + harmonic part."""
    domain = get_domain(spec)
    return (np.log(1.0 / mesh) + KAPPA_0) / np.pi + domain.harmonic_part(points)


def build_grid(spec: DomainSpec, n: int) -> DomainGrid:
    start_time = time.time()
    lattice = build_lattice(spec, n)
    domain = get_domain(spec)

    green = domain.green_matrix(lattice.points)
    np.fill_diagonal(green, diagonal_regularization(spec, lattice.points, lattice.mesh))

    elapsed = time.time() - start_time
    logger.info(f"Built {domain.name} grid n={n}: P={lattice.size}, mesh={lattice.mesh:.4g} in {elapsed:.2f}s")
    return DomainGrid(
        spec=lattice.spec,
        n=lattice.n,
        points=lattice.points,
        cell_area=lattice.cell_area,
        mesh=lattice.mesh,
        conf_radius=lattice.conf_radius,
        lower=lattice.lower,
        node_index=lattice.node_index,
        green=green,
    )


def green_disc(x, y) -> float:
    return UnitDisc().green(x, y)


def green_square(x, y, cutoff: int = 64) -> float:
    if cutoff < 16:
        raise ConfigurationError(f"series cutoff must be >= 16, got {cutoff}")
    return UnitSquare(series_cutoff=cutoff).green(x, y)


def conformal_radius(spec: DomainSpec, x) -> float:
    return float(get_domain(spec).conformal_radius(x)[0])


def macro_cell_labels(lattice: Lattice, k: int) -> np.ndarray:
    """Index of the k x k bounding-box macro-cell containing each point (row-major)."""
    if k < 1:
        raise ConfigurationError(f"partition size must be >= 1, got {k}")
    side = get_domain(lattice.spec).side()
    rel = (lattice.points - np.asarray(lattice.lower)) / side
    cells = np.clip(np.floor(rel * k).astype(np.int64), 0, k - 1)
    return cells[:, 0] * k + cells[:, 1]
