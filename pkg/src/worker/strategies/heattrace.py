import numpy as np

from src.bootstrap.logger import get_logger
from src.domain.grid import get_domain
from src.heat.annealed import annealed_diag_stat
from src.heat.asymptotics import boundary_correction_fit, plateau_estimate
from src.heat.trace import heat_trace, log_time_grid, trace_consistency
from src.spectral.weyl import weyl_fit

from .base import BaseExperimentStrategy

logger = get_logger("worker.heattrace")

TRACE_HEADER = ("t", "H", "tH")
DIAG_HEADER = ("replica", "seed", "x1", "x2", "t_p_diag", "laplace_stat", "resolution")
CLASSICAL_TOLERANCE = 0.10
LQG_TOLERANCE = 0.25


class HeatTraceStrategy(BaseExperimentStrategy):
    """Heat trace on a log time grid, its small-t plateau, the boundary fit and the annealed diagonal."""

    command = "heattrace"

    def execute(self) -> None:
        heat = self.config.heat
        replica = self.replica(0)
        spectrum, measure = replica.spectrum, replica.measure

        with self.stage("trace"):
            times = log_time_grid(1.0 / spectrum.lambdas[0], heat.decades, heat.points_per_decade)
            trace = heat_trace(spectrum, times)
            self.write_csv("heattrace.csv", TRACE_HEADER, zip(trace.times, trace.values, trace.scaled))

        with self.stage("plateau"):
            c_fit = weyl_fit(spectrum, measure, self.config.window_frac).resolved_slope
            plateau = plateau_estimate(trace, spectrum, measure, self.config.window_frac, c_fit=c_fit)
            self.flag("plateau", plateau.flags)
            window = (plateau.t_star * heat.fit_window_factor[0], plateau.t_star * heat.fit_window_factor[1])
            c_est = self.params.weyl_const * measure.total
            fit = boundary_correction_fit(trace.times, trace.scaled, c_est, window, gamma=self.params.gamma)
            self.flag("boundary_fit", fit.flags)

        self.record.summary.update({
            "plateau_t": plateau.t_star,
            "plateau_value": plateau.value,
            "plateau_ratio": plateau.ratio,
            "plateau_resolved_ratio": plateau.resolved_ratio,
            "c_fit": c_fit,
            "trusted_min_t": plateau.trusted_min_t,
            "trace_consistency": trace_consistency(spectrum, plateau.t_star),
            "boundary_c_est": c_est,
            "boundary_alpha": fit.alpha,
            "boundary_prefactor": fit.prefactor,
            "kpz_delta_half": fit.delta,
            "one_minus_delta": fit.one_minus_delta,
        })
        tolerance = CLASSICAL_TOLERANCE if self.params.gamma == 0.0 else LQG_TOLERANCE
        off = abs(plateau.resolved_ratio - 1.0)
        if off > tolerance:
            self.flag("plateau", [f"plateau off c_gamma mu_res(S) by {off:.1%}"])
        if self.params.gamma == 0.0:
            self.record.summary["area_ratio"] = plateau.value * 2.0 * np.pi / get_domain(self.config.domain).area
        logger.info(f"Plateau t*={plateau.t_star:.3g}: tH={plateau.value:.5g} (ratio {plateau.ratio:.3f}, "
                    f"resolved {plateau.resolved_ratio:.3f}), "
                    f"alpha={fit.alpha:.3f}")

        if heat.diag_replicas > 0:
            self.annealed_diagonal(heat.diag_t or plateau.t_star)

    def annealed_diagonal(self, t: float) -> None:
        replicas = self.config.heat.diag_replicas
        # replica 0 of the trace already recorded field seed 0
        for index in range(replicas):
            if index > 0:
                self.seed_for("field", index)
            self.seed_for("point", index)
        with self.stage("annealed"):
            stat = annealed_diag_stat(self.model, self.params, replicas, t, base_seed=self.config.base_seed,
                                      workers=self.config.workers, window_frac=self.config.window_frac)
        self.write_csv("diag.csv", DIAG_HEADER,
                       ((r.replica, r.seed, r.x1, r.x2, r.t_p_diag, r.laplace_stat, r.resolution) for r in stat.rows))
        self.record.summary.update({
            "diag_t": t,
            "diag_mean": stat.mean,
            "diag_cv": stat.coefficient_of_variation,
            "diag_ratio": stat.mean / self.params.weyl_const,
            "diag_resolved_mean": stat.resolved_mean,
            "diag_resolved_ratio": stat.resolved_mean / self.params.weyl_const,
        })
