from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.bootstrap.logger import get_logger
from src.spectral.pipeline import build_replica
from src.spectral.weyl import counting_variance, weyl_fit, weyl_window

from .base import BaseExperimentStrategy

logger = get_logger("worker.weyl")

WEYL_HEADER = ("replica", "seed", "mu_total", "c_hat", "discrepancy", "polya_fraction", "c_raw", "resolved_fraction")
COUNTS_HEADER = ("lambda", "mean_count", "var_count")
PROBES = 10
# median c_hat beyond this relative error is flagged
WEYL_TOLERANCE = 0.25
# below this share of the plain count at the window top the lattice has run out of cells
MIN_RESOLVED_FRACTION = 0.25


class WeylStrategy(BaseExperimentStrategy):
    """Per-replica Weyl constants, their median, and the ensemble variance of N(lambda)."""

    command = "weyl"

    def execute(self) -> None:
        model = self.model
        seeds = [self.seed_for("field", r) for r in range(self.config.replicas)]

        def one(index: int):
            replica = build_replica(model, self.params, seeds[index], index)
            return replica, weyl_fit(replica.spectrum, replica.measure, self.config.window_frac)

        with self.stage("replicas"):
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                results = list(pool.map(one, range(self.config.replicas)))

        rows = [(replica.index, replica.seed, replica.measure.total, fit.resolved_slope, fit.discrepancy,
                 fit.polya_fraction, fit.slope, fit.resolved_fraction)
                for replica, fit in results]
        slopes = np.array([fit.resolved_slope for _, fit in results])
        raw = np.array([fit.slope for _, fit in results])
        fractions = np.array([fit.resolved_fraction for _, fit in results])
        median = [float(np.median(np.array([row[k] for row in rows], dtype=float))) for k in range(2, 8)]
        self.write_csv("weyl.csv", WEYL_HEADER, [*rows, ("median", "", *median)])

        spectra = [replica.spectrum for replica, _ in results]
        n_lo, n_hi = weyl_window(spectra[0].size, self.config.window_frac)
        probes = np.linspace(spectra[0].lambdas[n_lo - 1], spectra[0].lambdas[n_hi - 1], PROBES)
        mean_counts, var_counts = counting_variance(spectra, probes)
        self.write_csv("weyl_counts.csv", COUNTS_HEADER, zip(probes, mean_counts, var_counts))

        target = self.params.weyl_const
        first = results[0][1]
        self.record.summary.update({
            "c_target": target,
            "c_hat": slopes.tolist(),
            "c_hat_median": float(np.median(slopes)),
            "c_hat_mean": float(np.mean(slopes)),
            "c_hat_variance": float(np.var(slopes, ddof=1)) if slopes.size > 1 else 0.0,
            "c_raw": raw.tolist(),
            "c_raw_median": float(np.median(raw)),
            "resolved_fraction_min": float(np.min(fractions)),
            "window": list(first.window),
            "berezin_fraction": first.berezin_fraction,
            "courant_ratio": first.courant_ratio,
            "min_relative_gap": first.min_relative_gap,
        })
        rel = abs(float(np.median(slopes)) - target) / target
        logger.info(f"Weyl over {len(results)} replica(s): median c_hat={np.median(slopes):.5f} "
                    f"vs c_gamma={target:.5f} ({rel:.1%})")
        reasons = []
        if rel > WEYL_TOLERANCE:
            reasons.append(f"median c_hat off c_gamma by {rel:.1%}")
        if np.min(fractions) < MIN_RESOLVED_FRACTION:
            reasons.append(f"window saturated: lattice resolves {np.min(fractions):.0%} of the Weyl count")
        self.flag("weyl", reasons)
