from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.bootstrap.errors import ConfigurationError
from src.bootstrap.logger import get_logger
from src.domain.schema import DomainGrid
from src.field.schema import CouplingParams, FieldSample, GmcMeasure
from src.lbm.clock import ClockSimulator

logger = get_logger("lbm.occupation")


@dataclass(frozen=True)
class OccupationReport:
    paths: int
    mc: float
    target: float
    z: float
    standard_error: float
    start_index: int
    snap_offset: float
    unfinished: int
    bridge_exits: int = 0


def snap_to_grid(grid: DomainGrid, x0) -> tuple:
    x0 = np.asarray(x0, dtype=float)
    idx = int(grid.lookup(x0)[0])
    if idx < 0:
        idx = int(np.argmin(np.sum((grid.points - x0) ** 2, axis=1)))
    offset = float(np.hypot(*(grid.points[idx] - x0)))
    if offset > 1e-12:
        logger.warning(f"Start point {x0.tolist()} snapped to grid point {grid.points[idx].tolist()} (offset {offset:.3g})")
    return idx, offset


def occupation_target(grid: DomainGrid, measure: GmcMeasure, start_index: int, f: np.ndarray) -> float:
    """sum_j g(x0, x_j) f_j mu_j"""
    return float(np.sum(grid.green[start_index] * f * measure.weights))


def occupation_check(field: Optional[FieldSample], grid: DomainGrid, measure: GmcMeasure, x0, f,
                     n_paths: int, dt: float, seed: int) -> OccupationReport:
    """Time-changed occupation integral by Monte Carlo against its Green-operator value."""
    f = np.broadcast_to(np.asarray(f, dtype=float), (grid.size,))
    if np.any(f < 0.0) or not np.all(np.isfinite(f)):
        raise ConfigurationError("occupation test function must be bounded and nonnegative")
    start_index, offset = snap_to_grid(grid, x0)

    simulator = ClockSimulator.from_field(field, grid, CouplingParams(gamma=measure.gamma))
    batch = simulator.run_batch(grid.points[start_index], dt, n_paths, seed, cell_values=np.ascontiguousarray(f))

    mc = float(np.mean(batch.occupation))
    se = float(np.std(batch.occupation, ddof=1) / np.sqrt(n_paths)) if n_paths > 1 else 0.0
    target = occupation_target(grid, measure, start_index, f)
    z = (mc - target) / se if se > 0.0 else 0.0
    logger.info(f"Occupation check: mc={mc:.5g}, target={target:.5g}, z={z:.2f} over {n_paths} paths")
    return OccupationReport(paths=n_paths, mc=mc, target=target, z=float(z), standard_error=se,
                            start_index=start_index, snap_offset=offset, unfinished=batch.unfinished,
                            bridge_exits=batch.bridge_exits)
