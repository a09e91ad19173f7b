import numpy as np

from src.bootstrap.errors import ConfigurationError
from src.bootstrap.logger import get_logger
from src.domain.grid import macro_cell_labels
from src.lbm.bridge import bridge_identity_check, bulk_median_lambda
from src.lbm.occupation import occupation_check, snap_to_grid

from .base import BaseExperimentStrategy

logger = get_logger("worker.lbm")

OCCUPATION_HEADER = ("paths", "mc", "target", "z")
BRIDGE_HEADER = ("lambda", "mc", "spectral", "rel_gap", "n_bridges", "classical", "quadrature_error")
Z_LIMIT = 3.0


class LbmStrategy(BaseExperimentStrategy):
    """Monte Carlo Liouville Brownian motion: occupation formula and bridge identity."""

    command = "lbm"

    def execute(self) -> None:
        mc = self.config.mc
        replica = self.replica(0)
        grid = self.grid
        dt = mc.dt or grid.mesh ** 2 / 4.0
        start_index, _ = snap_to_grid(grid, mc.x0)

        if mc.occupation_f == "one":
            f = np.ones(grid.size)
        else:
            labels = macro_cell_labels(grid, self.config.chaos.partition_k)
            f = (labels == labels[start_index]).astype(float)

        with self.stage("occupation"):
            occupation = occupation_check(replica.field, grid, replica.measure, mc.x0, f,
                                          mc.n_paths, dt, self.seed_for("paths", 0))
        self.write_csv("occupation.csv", OCCUPATION_HEADER,
                       [(occupation.paths, occupation.mc, occupation.target, occupation.z)])
        if abs(occupation.z) > Z_LIMIT:
            self.flag("occupation", [f"|z|={abs(occupation.z):.2f} exceeds {Z_LIMIT:g}"])
        if occupation.unfinished:
            self.flag("occupation", [f"{occupation.unfinished} path(s) cut off before exit"])

        lam = mc.lam or bulk_median_lambda(replica.spectrum, self.config.window_frac)
        u_min = mc.u_min or 0.01 / lam
        if u_min >= mc.u_max:
            raise ConfigurationError(f"bridge durations need u_min < u_max, got {u_min:g} >= {mc.u_max:g}")
        u_grid = np.geomspace(u_min, mc.u_max, mc.u_points)
        self.seed_for("bridges", 0)
        with self.stage("bridge"):
            bridge = bridge_identity_check(replica.field, grid, replica.spectrum, self.params, start_index, lam,
                                           mc.n_bridges, u_grid, dt, base_seed=self.config.base_seed)
        self.write_csv("bridge.csv", BRIDGE_HEADER,
                       [(bridge.lam, bridge.mc, bridge.spectral, bridge.rel_gap, bridge.n_bridges,
                         bridge.classical, bridge.quadrature_error)])
        self.flag("bridge", bridge.flags)

        self.record.summary.update({
            "start_index": start_index,
            "dt": dt,
            "occupation_mc": occupation.mc,
            "occupation_target": occupation.target,
            "occupation_z": occupation.z,
            "occupation_se": occupation.standard_error,
            "occupation_bridge_exits": occupation.bridge_exits,
            "bridge_lambda": lam,
            "bridge_rel_gap": bridge.rel_gap,
            "bridge_se": bridge.standard_error,
            "bridge_classical": bridge.classical,
            "bridge_quadrature_error": bridge.quadrature_error,
            "bridge_inconclusive": bridge.inconclusive,
        })
        logger.info(f"LBM at x0={list(mc.x0)}: occupation z={occupation.z:.2f}, bridge gap={bridge.rel_gap:.3f}")
