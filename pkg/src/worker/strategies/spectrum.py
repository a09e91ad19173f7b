import numpy as np

from src.bootstrap.logger import get_logger
from src.field.snapshot import write_snapshot
from src.heat.trace import semigroup_defect
from src.spectral.eigen import eigfun_smoothing_residual, inverse_square_sum_error, orthonormality_error
from src.spectral.io import write_eigenfunction_csv, write_spectrum_csv
from src.spectral.operator import hs_norm
from src.spectral.weyl import classical_reference_spectrum

from .base import BaseExperimentStrategy

logger = get_logger("worker.spectrum")

HS_TOLERANCE = 1e-10
IDENTITY_TOLERANCE = 1e-8
CLASSICAL_TOLERANCE = 0.05
CLASSICAL_HEAD = 10
SEMIGROUP_PROBES = 20
RESIDUAL_PROBES = 10


class SpectrumStrategy(BaseExperimentStrategy):
    """field -> gmc -> operator -> eigenpairs, plus the exactness checks of one replica."""

    command = "spectrum"

    def execute(self) -> None:
        replica = self.replica(0)
        spectrum = replica.spectrum
        comments = [self.record.csv_comment()]

        with self.stage("write"):
            self.track(write_spectrum_csv(self.output_dir / "spectrum.csv", spectrum, comments))
            self.track(write_snapshot(self.output_dir / "field.lqgf", replica.field.values, replica.measure.weights))
            for n in self.config.eigenfunctions:
                self.track(write_eigenfunction_csv(self.output_dir / f"eigenfunction_{n}.csv",
                                                   self.grid, spectrum, n, comments))

        with self.stage("checks"):
            self.run_checks(replica)

        self.record.summary.update({
            "points": spectrum.size,
            "mu_total": replica.measure.total,
            "lambda_1": float(spectrum.lambdas[0]),
            "lambda_max": float(spectrum.lambdas[-1]),
        })
        logger.info(f"Spectrum of P={spectrum.size}: lambda_1={spectrum.lambdas[0]:.5g}, "
                    f"mu(S)={replica.measure.total:.5g}")

    def run_checks(self, replica) -> None:
        spectrum, operator = replica.spectrum, replica.operator
        frobenius = float(np.linalg.norm(operator.matrix))
        hs_gap = abs(hs_norm(operator) - frobenius) / frobenius
        probe_indices = np.unique(np.linspace(1, spectrum.size, RESIDUAL_PROBES).astype(int))
        residual = max(eigfun_smoothing_residual(spectrum, operator, int(n)) /
                       max(np.max(np.abs(spectrum.eigfunc(int(n)))), 1e-300) for n in probe_indices)
        checks = {
            "hs_identity_gap": hs_gap,
            "inverse_square_sum_gap": inverse_square_sum_error(spectrum, operator),
            "orthonormality_error": orthonormality_error(spectrum),
            "smoothing_residual": float(residual),
            "semigroup_defect": semigroup_defect(spectrum, SEMIGROUP_PROBES, self.seed_for("point", 0)),
        }
        self.record.summary.update(checks)

        flags = [f"hs_identity_gap {hs_gap:.2e} exceeds {HS_TOLERANCE:g}"] if hs_gap > HS_TOLERANCE else []
        flags += [f"{name} {value:.2e} exceeds {IDENTITY_TOLERANCE:g}"
                  for name, value in checks.items()
                  if name != "hs_identity_gap" and value > IDENTITY_TOLERANCE]

        if self.params.gamma == 0.0:
            head = min(CLASSICAL_HEAD, spectrum.size)
            reference = classical_reference_spectrum(self.config.domain, head)
            rel = float(np.max(np.abs(spectrum.lambdas[:head] - reference) / reference))
            self.record.summary["classical_head_error"] = rel
            if rel > CLASSICAL_TOLERANCE:
                flags.append(f"first {head} eigenvalues differ from the Dirichlet reference by {rel:.1%}")
        self.flag("spectrum", flags)
