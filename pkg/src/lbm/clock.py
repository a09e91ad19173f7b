"""Liouville Brownian motion through the quantum clock.

A planar Brownian path is run on a fixed step; each step advances the clock by
eps^{gamma^2/2} exp(gamma h(nearest node)) dt, the same regularized density as
the lattice GMC weights divided by the cell area.

Between two inside positions a and b the path may still have left the domain;
that happens with probability exp(-2 d(a) d(b) / dt) for the boundary
distance d, treating the nearest boundary piece as straight. An exit is
placed at the middle of its step, so the last clock increment counts half.
"""
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.bootstrap.errors import ConfigurationError
from src.bootstrap.logger import get_logger
from src.domain.grid import get_domain
from src.domain.schema import Lattice
from src.field.schema import CouplingParams, FieldSample

logger = get_logger("lbm.clock")

# paths still inside after this much Brownian time are cut off and counted
MAX_BROWNIAN_TIME = 20.0
STEP_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class ClockPath:
    start: np.ndarray
    dt: float
    steps: np.ndarray             # (exit_step, 2) Brownian increments
    clock_increments: np.ndarray  # (exit_step,)
    exit_step: int
    F_total: float
    # exit detected between two inside positions
    bridge_exit: bool = False
    exited: bool = True

    @property
    def positions(self) -> np.ndarray:
        return self.start + np.vstack([np.zeros((1, 2)), np.cumsum(self.steps, axis=0)])

    @property
    def exit_time(self) -> float:
        return (self.exit_step - 0.5) * self.dt if self.exited else self.exit_step * self.dt


@dataclass(frozen=True, eq=False)
class ClockBatch:
    exit_steps: np.ndarray
    exit_times: np.ndarray
    F_totals: np.ndarray
    occupation: Optional[np.ndarray]
    dt: float
    unfinished: int
    bridge_exits: int = 0


class ClockSimulator:
    """Nearest-node clock rates over a lattice; dropped nodes use h = 0."""

    def __init__(self, lattice: Lattice, values: Optional[np.ndarray], gamma: float):
        self.lattice = lattice
        self.gamma = gamma
        self.domain = get_domain(lattice.spec)
        values = np.zeros(lattice.size) if values is None else np.asarray(values, dtype=float)
        self.base_rate = lattice.mesh ** (gamma ** 2 / 2.0)
        self.rates = self.base_rate * np.exp(gamma * values)

    @classmethod
    def from_field(cls, field: Optional[FieldSample], lattice: Lattice, params: CouplingParams) -> "ClockSimulator":
        return cls(lattice, None if field is None else field.values, params.gamma)

    def check_step(self, dt: float) -> None:
        if dt <= 0.0 or dt > self.lattice.mesh ** 2 / 4.0:
            raise ConfigurationError(
                f"dt={dt:g} must lie in (0, mesh^2/4 = {self.lattice.mesh ** 2 / 4.0:g}]"
            )

    def rate_at(self, xy: np.ndarray) -> np.ndarray:
        idx = self.lattice.lookup(xy)
        return np.where(idx >= 0, self.rates[np.maximum(idx, 0)], self.base_rate)

    def values_at(self, xy: np.ndarray, cell_values: np.ndarray) -> np.ndarray:
        idx = self.lattice.lookup(xy)
        return np.where(idx >= 0, cell_values[np.maximum(idx, 0)], 0.0)

    def crossed(self, before: np.ndarray, after: np.ndarray, dt: float, uniforms: np.ndarray) -> np.ndarray:
        """Steps that left the domain: endpoint outside, or a bridge crossing between inside endpoints."""
        inside = self.domain.contains(after)
        gap = np.where(inside, self.domain.boundary_distance(before) * self.domain.boundary_distance(after), 0.0)
        return ~inside | (uniforms < np.exp(-2.0 * np.maximum(gap, 0.0) / dt))

    def run_path(self, x0, dt: float, seed: int) -> ClockPath:
        self.check_step(dt)
        start = self.domain.require_inside(x0)[0]
        rng = np.random.default_rng(seed)
        max_steps = int(np.ceil(MAX_BROWNIAN_TIME / dt))
        chunks = []
        position = start.copy()
        exit_step = None
        bridge_exit = False
        taken = 0
        while exit_step is None and taken < max_steps:
            increments = np.sqrt(dt) * rng.standard_normal((STEP_CHUNK, 2))
            uniforms = rng.random(STEP_CHUNK)
            trail = position + np.cumsum(increments, axis=0)
            before = np.vstack([position[None, :], trail[:-1]])
            hits = np.flatnonzero(self.crossed(before, trail, dt, uniforms))
            if hits.size:
                cut = int(hits[0]) + 1
                exit_step = taken + cut
                bridge_exit = bool(self.domain.contains(trail[cut - 1])[0])
                increments = increments[:cut]
                trail = trail[:cut]
            chunks.append(increments)
            taken += increments.shape[0]
            position = trail[-1]
        exited = exit_step is not None
        if not exited:
            logger.warning(f"Clock path from {start.tolist()} did not exit within {max_steps} steps")
            exit_step = taken

        steps = np.vstack(chunks)[:exit_step]
        visited = start + np.vstack([np.zeros((1, 2)), np.cumsum(steps, axis=0)[:-1]])
        clock = self.rate_at(visited) * dt
        F_total = float(clock.sum() - (0.5 * clock[-1] if exited else 0.0))
        return ClockPath(start=start, dt=dt, steps=steps, clock_increments=clock, exit_step=int(exit_step),
                         F_total=F_total, bridge_exit=bridge_exit, exited=exited)

    def run_batch(self, x0, dt: float, n_paths: int, seed: int,
                  cell_values: Optional[np.ndarray] = None) -> ClockBatch:
        """Independent paths stepped together; occupation accumulates cell_values * dF."""
        self.check_step(dt)
        start_time = time.time()
        start = self.domain.require_inside(x0)[0]
        rng = np.random.default_rng(seed)
        max_steps = int(np.ceil(MAX_BROWNIAN_TIME / dt))

        positions = np.tile(start, (n_paths, 1))
        alive = np.arange(n_paths)
        exit_steps = np.zeros(n_paths, dtype=np.int64)
        F_totals = np.zeros(n_paths)
        occupation = None if cell_values is None else np.zeros(n_paths)
        bridge_exits = 0

        step = 0
        while alive.size and step < max_steps:
            current = positions[alive]
            increment = self.rate_at(current) * dt
            F_totals[alive] += increment
            weighted = None
            if occupation is not None:
                weighted = self.values_at(current, cell_values) * increment
                occupation[alive] += weighted
            moved = current + np.sqrt(dt) * rng.standard_normal((alive.size, 2))
            exited = self.crossed(current, moved, dt, rng.random(alive.size))
            positions[alive] = moved
            step += 1

            gone = alive[exited]
            exit_steps[gone] = step
            F_totals[gone] -= 0.5 * increment[exited]
            if occupation is not None:
                occupation[gone] -= 0.5 * weighted[exited]
            bridge_exits += int(np.count_nonzero(self.domain.contains(moved[exited])))
            alive = alive[~exited]

        exit_times = (exit_steps - 0.5) * dt
        if alive.size:
            logger.warning(f"{alive.size} of {n_paths} clock paths still inside after {max_steps} steps")
            exit_steps[alive] = step
            exit_times[alive] = step * dt
        logger.info(f"Simulated {n_paths} clock paths (dt={dt:g}, gamma={self.gamma}, "
                    f"{bridge_exits} bridge exits) in {time.time() - start_time:.2f}s")
        return ClockBatch(exit_steps=exit_steps, exit_times=exit_times, F_totals=F_totals, occupation=occupation,
                          dt=dt, unfinished=int(alive.size), bridge_exits=bridge_exits)


def simulate_clock_path(field: Optional[FieldSample], grid: Lattice, params: CouplingParams,
                        x0, dt: float, seed: int) -> ClockPath:
    return ClockSimulator.from_field(field, grid, params).run_path(x0, dt, seed)


def simulate_exit_times(field: Optional[FieldSample], grid: Lattice, params: CouplingParams,
                        x0, dt: float, n_paths: int, seed: int) -> ClockBatch:
    return ClockSimulator.from_field(field, grid, params).run_batch(x0, dt, n_paths, seed)
