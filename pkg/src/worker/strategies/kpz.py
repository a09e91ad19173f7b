from src.bootstrap.logger import get_logger
from src.heat.kpz import kpz_solve

from .base import BaseExperimentStrategy

logger = get_logger("worker.kpz")

KPZ_HEADER = ("x", "gamma", "delta", "one_minus_delta", "boundary_coupling")


class KpzStrategy(BaseExperimentStrategy):
    """Quantum scaling exponent for one Euclidean exponent; no field is sampled."""

    command = "kpz"

    def execute(self) -> None:
        with self.stage("kpz"):
            exponents = kpz_solve(self.config.kpz_x, self.params.gamma)
        self.write_csv("kpz.csv", KPZ_HEADER, [(exponents.euclid_x, exponents.gamma, exponents.delta,
                                                1.0 - exponents.delta, exponents.boundary_coupling)])
        self.record.summary.update({"delta": exponents.delta, "boundary_coupling": exponents.boundary_coupling})
        logger.info(f"KPZ x={exponents.euclid_x:g}, gamma={exponents.gamma:g}: delta={exponents.delta:.12f}")
