import numpy as np

from src.bootstrap.logger import get_logger
from src.chaos.berry import MAX_RADIUS, BerryReport, berry_autocorr, window_superposition
from src.chaos.que import que_trend
from src.spectral.weyl import weyl_window

from .base import BaseExperimentStrategy

logger = get_logger("worker.que")

QUE_HEADER = ("n", "tv", "ipr")
BERRY_HEADER = ("r", "autocorr", "j0_fit")
TREND_HEADER = ("n", "median_tv")


class QueStrategy(BaseExperimentStrategy):
    """Eigenfunction equidistribution over the bulk window and the random-wave autocorrelation."""

    command = "que"

    def execute(self) -> None:
        chaos = self.config.chaos
        replica = self.input_replica()
        spectrum, measure = replica.spectrum, replica.measure

        with self.stage("que"):
            reports, medians = que_trend(spectrum, measure, self.config.window_frac, chaos.partition_k)
        self.write_csv("que.csv", QUE_HEADER, ((r.n, r.tv_distance, r.ipr) for r in reports))
        self.write_csv("que_trend.csv", TREND_HEADER, medians)

        n = chaos.berry_n or weyl_window(spectrum.size, self.config.window_frac)[1]
        lattice = measure.lattice
        radii = np.linspace(1.5 * lattice.mesh, MAX_RADIUS, chaos.berry_radii)
        with self.stage("berry"):
            berry = berry_autocorr(spectrum, measure, n, radii, seed=self.seed_for("berry", 0),
                                   patch_radius=chaos.berry_patch)
            self.write_berry("berry.csv", berry)
            self.flag("berry", berry.flags)
            if chaos.superposition_omega is not None:
                values = window_superposition(spectrum, n, chaos.superposition_omega, self.seed_for("berry", 1))
                wave = berry_autocorr(spectrum, measure, n, radii, center=berry.center,
                                      patch_radius=chaos.berry_patch, values=values)
                self.write_berry("berry_superposition.csv", wave)
                self.record.summary["superposition_misfit"] = wave.misfit

        self.record.summary.update({
            "que_median_tv": float(np.median([r.tv_distance for r in reports])),
            "que_trend": [[int(idx), tv] for idx, tv in medians],
            "berry_n": n,
            "berry_k": berry.k_n,
            "berry_misfit": berry.misfit,
        })
        logger.info(f"QUE median TV={self.record.summary['que_median_tv']:.4f} over {len(reports)} eigenfunctions; "
                    f"Berry n={n}: k={berry.k_n:.4g}, misfit={berry.misfit:.3f}")

    def write_berry(self, name: str, report: BerryReport) -> None:
        fit = report.j0_fit
        rows = ((r, value, j0) for r, value, j0, kept in zip(report.radii, report.profile, fit, report.kept) if kept)
        self.write_csv(name, BERRY_HEADER, rows)
