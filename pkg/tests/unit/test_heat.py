import numpy as np
import pytest

from src.bootstrap.errors import ConfigurationError, DomainError
from src.domain.schema import DomainKind, DomainSpec
from src.field.schema import CouplingParams, GmcMeasure
from src.heat.annealed import annealed_diag_stat, laplace_diag_statistic
from src.heat.asymptotics import NO_PLATEAU, boundary_correction_fit, plateau_estimate
from src.heat.kpz import kpz_solve
from src.heat.tauberian import karamata_check
from src.heat.trace import (HeatTrace, classical_heat_trace_expansion, heat_kernel_diagonal, heat_kernel_matrix,
                            heat_trace, local_heat_trace, log_time_grid, semigroup_defect, spectral_heat_kernel,
                            subprobability_check, trace_consistency)
from src.spectral.eigen import LiouvilleSpectrum, eigendecompose
from src.spectral.operator import LiouvilleOperator
from src.spectral.weyl import weyl_fit

pytestmark = pytest.mark.unit


@pytest.fixture
def toy_spectrum(rng):
    """Six-point positive operator with non-uniform weights"""
    a = rng.standard_normal((6, 6))
    op = LiouvilleOperator.from_kernel(a @ a.T + 6 * np.eye(6), rng.uniform(0.2, 1.0, 6))
    return eigendecompose(op)


class TestHeatTrace:
    def test_single_eigenvalue(self):
        trace = heat_trace(LiouvilleSpectrum(lambdas=np.array([1.0])), [1.0])
        assert trace.values[0] == pytest.approx(np.exp(-1.0))

    def test_two_eigenvalues(self):
        trace = heat_trace(LiouvilleSpectrum(lambdas=np.array([1.0, 2.0])), [np.log(2.0)])
        assert trace.values[0] == pytest.approx(0.75)

    def test_small_time_counts_points(self):
        trace = heat_trace(LiouvilleSpectrum(lambdas=np.arange(1.0, 11.0)), [1e-12])
        assert trace.values[0] == pytest.approx(10.0)

    def test_nonpositive_time(self):
        with pytest.raises(DomainError):
            heat_trace(LiouvilleSpectrum(lambdas=np.array([1.0])), [0.0])

    def test_time_grid(self):
        times = log_time_grid(1.0, 4.0, 10)
        assert times.shape == (41,)
        assert times[0] == pytest.approx(1e-4) and times[-1] == pytest.approx(1.0)

    def test_decreasing_and_log_convex(self, disc_replica):
        times = log_time_grid(1.0 / disc_replica.spectrum.lambdas[0], 4.0, 10)
        trace = heat_trace(disc_replica.spectrum, times)
        assert np.all(np.diff(trace.values) < 0.0)
        secants = np.diff(np.log(trace.values)) / np.diff(times)
        assert np.all(np.diff(secants) >= -1e-9 * np.abs(secants[1:]))


class TestHeatKernel:
    def test_symmetric(self, toy_spectrum):
        matrix = heat_kernel_matrix(toy_spectrum, 0.3)
        assert np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-15)
        assert spectral_heat_kernel(toy_spectrum, 0.3, 1, 4) == pytest.approx(matrix[1, 4])

    def test_semigroup_brute_force(self, toy_spectrum):
        t, s = 0.4, 0.7
        composed = heat_kernel_matrix(toy_spectrum, t) @ np.diag(toy_spectrum.weights) @ heat_kernel_matrix(toy_spectrum, s)
        assert np.allclose(composed, heat_kernel_matrix(toy_spectrum, t + s), rtol=1e-8, atol=0.0)
        assert semigroup_defect(toy_spectrum, 20, seed=0) < 1e-8

    def test_diagonal_of_decoupled_points(self):
        # eigenvalues 1/4 and 1/2, each carried by one point
        spectrum = eigendecompose(LiouvilleOperator.from_kernel(np.eye(2), [2.0, 4.0]))
        t = 1.7
        expected = [0.5 * np.exp(-0.5 * t), 0.25 * np.exp(-0.25 * t)]
        assert np.allclose(heat_kernel_diagonal(spectrum, t), expected, rtol=1e-12)

    def test_local_trace_matches_trace(self, toy_spectrum):
        assert trace_consistency(toy_spectrum, 0.2) < 1e-10
        mask = np.array([True, False, True, False, False, False])
        assert local_heat_trace(toy_spectrum, 0.2, mask) < local_heat_trace(toy_spectrum, 0.2)

    def test_mass_decays(self, toy_spectrum):
        assert subprobability_check(toy_spectrum, 1e3 / toy_spectrum.lambdas[0]) < 1e-100

    def test_single_point_subprobability(self):
        spectrum = eigendecompose(LiouvilleOperator.from_kernel([[0.5]], [0.8]))
        assert subprobability_check(spectrum, 1.0) <= 1.0

    def test_gamma_zero_disc_subprobability(self):
        from src.domain.grid import build_grid
        from src.spectral.operator import assemble_operator

        grid = build_grid(DomainSpec(), 32)
        measure = GmcMeasure(weights=np.full(grid.size, grid.cell_area), gamma=0.0, lattice=grid)
        spectrum = eigendecompose(assemble_operator(grid, measure))
        assert subprobability_check(spectrum, 1.0) <= 1.0 + 1e-6


class TestClassicalExpansion:
    def test_square_terms(self):
        t = 1e-3
        value = classical_heat_trace_expansion(DomainSpec(kind=DomainKind.UNIT_SQUARE), [t])[0]
        assert value == pytest.approx(1 / (2 * np.pi * t) - 4 / (8 * np.sqrt(np.pi * t / 2)))


class TestPlateau:
    def test_pure_weyl_plateau(self):
        size = 10_000
        spectrum = LiouvilleSpectrum(lambdas=np.arange(1.0, size + 1.0))
        # c_0 mu(S) = 1 when mu(S) = 2 pi
        measure = GmcMeasure(weights=np.array([2 * np.pi]), gamma=0.0)
        trace = heat_trace(spectrum, np.logspace(-6, 0, 61))
        report = plateau_estimate(trace, spectrum, measure)
        assert report.value == pytest.approx(1.0, rel=0.01)
        assert report.ratio == pytest.approx(1.0, rel=0.01)
        assert report.trusted_min_t == pytest.approx(1 / 2000)

    def test_monotone_trace_has_no_plateau(self):
        spectrum = LiouvilleSpectrum(lambdas=np.arange(1.0, 201.0))
        times = np.logspace(-1, 1, 30)
        trace = HeatTrace(times=times, values=np.exp(-times) / times)
        report = plateau_estimate(trace, spectrum, GmcMeasure(weights=np.array([1.0]), gamma=0.0))
        assert NO_PLATEAU in report.flags

    def test_resolved_ratio(self, disc_replica):
        spectrum, measure = disc_replica.spectrum, disc_replica.measure
        trace = heat_trace(spectrum, log_time_grid(1.0 / spectrum.lambdas[0], 4.0, 10))
        plain = plateau_estimate(trace, spectrum, measure)
        assert plain.resolved_ratio == plain.ratio
        report = plateau_estimate(trace, spectrum, measure, c_fit=weyl_fit(spectrum, measure).resolved_slope)
        assert report.t_star == plain.t_star
        assert report.resolved_ratio >= report.ratio

    def test_needs_twenty_times(self):
        spectrum = LiouvilleSpectrum(lambdas=np.arange(1.0, 201.0))
        trace = heat_trace(spectrum, np.logspace(-3, 0, 10))
        with pytest.raises(ConfigurationError):
            plateau_estimate(trace, spectrum, GmcMeasure(weights=np.array([1.0]), gamma=0.0))


class TestBoundaryFit:
    def test_square_root_correction(self):
        times = np.logspace(-5, -2, 40)
        scaled = 0.3 - 0.05 * np.sqrt(times)
        fit = boundary_correction_fit(times, scaled, 0.3, (1e-5, 1e-2), gamma=1.0)
        assert fit.alpha == pytest.approx(0.5, abs=1e-8)
        assert fit.prefactor == pytest.approx(0.05, rel=1e-6)
        assert fit.delta == pytest.approx(kpz_solve(0.5, 1.0).delta)
        assert fit.one_minus_delta == pytest.approx(1.0 - fit.delta)
        assert fit.flags == []

    def test_nonpositive_residuals_flagged(self):
        times = np.logspace(-3, -1, 10)
        fit = boundary_correction_fit(times, np.full(10, 0.5), 0.3, (1e-3, 1e-1))
        assert fit.points_used == 0
        assert np.isnan(fit.alpha)
        assert "nonpositive residuals in window" in fit.flags

    def test_c_est_must_exceed_window_supremum(self):
        times = np.logspace(-3, -1, 10)
        fit = boundary_correction_fit(times, 0.3 - 0.05 * np.sqrt(times), 0.29, (1e-3, 1e-1))
        assert "c_est not above sup of t H in window" in fit.flags
        fit = boundary_correction_fit(times, 0.3 - 0.05 * np.sqrt(times), 0.3, (1e-3, 1e-1))
        assert fit.flags == []
        assert fit.alpha == pytest.approx(0.5, abs=1e-8)


class TestKaramata:
    def test_lebesgue(self):
        h = 1e-6
        locations = h * (np.arange(1, 50_001) - 0.5)
        report = karamata_check(locations, h, rho=1.0, regime="zero")
        assert report.relative_gap < 0.02
        assert report.counting_limit == pytest.approx(1.0, rel=0.02)
        assert report.flags == []

    def test_integer_atoms(self):
        report = karamata_check(np.arange(1.0, 40_001.0), 1.0, rho=1.0, regime="infinity")
        assert report.relative_gap < 0.02
        assert report.flags == []

    def test_single_atom(self):
        report = karamata_check([0.0], [2.5], rho=0.0)
        assert report.laplace_limit == pytest.approx(2.5)
        assert report.counting_limit == pytest.approx(2.5)
        assert report.relative_gap == pytest.approx(0.0)

    def test_negative_rho(self):
        with pytest.raises(ConfigurationError):
            karamata_check([1.0], [1.0], rho=-1.0)


class TestKpz:
    def test_gamma_zero_is_identity(self):
        assert kpz_solve(0.3, 0.0).delta == pytest.approx(0.3, abs=1e-15)

    def test_pure_gravity_value(self):
        exponents = kpz_solve(0.5, np.sqrt(8.0 / 3.0))
        assert exponents.delta == pytest.approx((np.sqrt(13.0) - 1.0) / 4.0, abs=1e-12)

    @pytest.mark.parametrize("gamma", [k / 10 for k in range(1, 20)])
    def test_closed_form(self, gamma):
        closed = 0.5 + (2.0 / gamma ** 2) * (np.sqrt(1.0 + gamma ** 4 / 16.0) - 1.0)
        assert kpz_solve(0.5, gamma).delta == pytest.approx(closed, abs=1e-12)

    @pytest.mark.parametrize("gamma", [0.5, 1.0, 1.5, 1.9])
    def test_quantum_disc_boundary(self, gamma):
        assert kpz_solve(0.5 - gamma ** 2 / 16.0, gamma).delta == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("gamma", [0.5, 1.0, 1.9])
    def test_monotone_in_x(self, gamma):
        deltas = [kpz_solve(x, gamma).delta for x in np.linspace(0.05, 1.0, 20)]
        assert np.all(np.diff(deltas) > 0.0)

    def test_boundary_coupling(self):
        exponents = kpz_solve(0.5, 1.5)
        assert exponents.boundary_coupling == pytest.approx(1.5 * (1.0 - exponents.delta))

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            kpz_solve(0.0, 1.0)
        with pytest.raises(DomainError):
            kpz_solve(0.5, 2.0)


class TestAnnealed:
    def test_laplace_statistic_single_mode(self):
        spectrum = eigendecompose(LiouvilleOperator.from_kernel([[0.5]], [2.0]))
        f_sq = spectrum.eigfunc(1)[0] ** 2
        lam = 3.0
        assert laplace_diag_statistic(spectrum, 0, lam) == pytest.approx(lam * f_sq / (spectrum.lambdas[0] + lam) ** 2)

    def test_replica_floor(self, disc_model):
        with pytest.raises(ConfigurationError):
            annealed_diag_stat(disc_model, CouplingParams(gamma=1.0), replicas=5, t=0.01)

    def test_small_ensemble(self, disc_model):
        stat = annealed_diag_stat(disc_model, CouplingParams(gamma=1.0), replicas=4, t=0.01,
                                  base_seed=11, workers=2, min_replicas=None)
        assert [row.replica for row in stat.rows] == [0, 1, 2, 3]
        assert [row.seed for row in stat.rows] == [11, 12, 13, 14]
        assert np.all(stat.samples > 0.0)
        assert stat.coefficient_of_variation >= 0.0
        resolution = np.array([row.resolution for row in stat.rows])
        assert np.all((resolution > 0.0) & (resolution <= 1.0))
        assert np.all(stat.resolved_samples >= stat.samples)
