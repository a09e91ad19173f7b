import numpy as np
import pytest

from src.bootstrap.errors import ConfigurationError, NumericalError, OperatorNotPositiveError
from src.domain.schema import DomainKind, DomainSpec
from src.field.schema import CouplingParams, GmcMeasure
from src.spectral.eigen import (LiouvilleSpectrum, counting_function, eigendecompose, eigfun_smoothing_residual,
                                inverse_square_sum_error, orthonormality_error)
from src.spectral.io import read_spectrum_csv, write_eigenfunction_csv, write_spectrum_csv
from src.spectral.operator import LiouvilleOperator, assemble_operator, hs_norm
from src.spectral.pipeline import replica_from_weights
from src.spectral.resolution import (fit_resolved_slope, point_resolution, resolved_count, resolved_fraction,
                                     resolved_levels, resolved_mass)
from src.spectral.weyl import classical_reference_spectrum, counting_variance, weyl_fit, weyl_window

pytestmark = pytest.mark.unit


def random_operator(rng, size):
    a = rng.standard_normal((size, size))
    return LiouvilleOperator.from_kernel(a @ a.T + size * np.eye(size), rng.uniform(0.5, 2.0, size))


class TestOperator:
    def test_one_by_one(self):
        op = LiouvilleOperator.from_kernel([[2.0]], [3.0])
        assert op.matrix[0, 0] == pytest.approx(6.0, rel=1e-15)
        assert hs_norm(op) == pytest.approx(6.0)

    def test_bitwise_symmetric(self, rng):
        op = random_operator(rng, 9)
        assert np.array_equal(op.matrix, op.matrix.T)

    def test_brute_force_product(self, rng):
        kernel = rng.uniform(size=(3, 3))
        kernel = kernel + kernel.T
        weights = rng.uniform(0.1, 1.0, 3)
        root = np.diag(np.sqrt(weights))
        op = LiouvilleOperator.from_kernel(kernel, weights)
        assert np.allclose(op.matrix, root @ kernel @ root, rtol=1e-14, atol=0.0)

    def test_hs_two_by_two(self):
        op = LiouvilleOperator.from_kernel(np.ones((2, 2)), [1.0, 4.0])
        assert hs_norm(op) == pytest.approx(5.0)

    def test_hs_equals_frobenius(self, rng):
        op = random_operator(rng, 5)
        assert hs_norm(op) == pytest.approx(np.linalg.norm(op.matrix), rel=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ConfigurationError):
            LiouvilleOperator.from_kernel(np.eye(3), np.ones(2))

    def test_grid_measure_mismatch(self, disc_grid):
        with pytest.raises(ConfigurationError):
            assemble_operator(disc_grid, GmcMeasure(weights=np.ones(3), gamma=0.0))


class TestEigendecompose:
    def test_identity(self):
        spectrum = eigendecompose(LiouvilleOperator.from_kernel(np.eye(3), np.ones(3)))
        assert np.allclose(spectrum.lambdas, [1.0, 1.0, 1.0])

    def test_diagonal_single_point_eigenfunctions(self):
        spectrum = eigendecompose(LiouvilleOperator.from_kernel(np.eye(2), [2.0, 4.0]))
        assert np.allclose(spectrum.lambdas, [0.25, 0.5])
        assert np.allclose(spectrum.eigfunc(1), [0.0, 0.5])
        assert np.allclose(spectrum.eigfunc(2), [1 / np.sqrt(2.0), 0.0])

    def test_mu_squares_match_frobenius(self, rng):
        op = random_operator(rng, 6)
        spectrum = eigendecompose(op)
        assert np.sum(spectrum.mu_n ** 2) == pytest.approx(np.sum(op.matrix ** 2), rel=1e-12)
        assert inverse_square_sum_error(spectrum, op) < 1e-12

    def test_negative_operator_rejected(self):
        with pytest.raises(OperatorNotPositiveError) as info:
            eigendecompose(LiouvilleOperator.from_kernel(-np.eye(2), np.ones(2)))
        assert info.value.exit_code == 3

    def test_smoothing_residual_toys(self, rng):
        one = LiouvilleOperator.from_kernel([[2.0]], [3.0])
        assert eigfun_smoothing_residual(eigendecompose(one), one, 1) <= 1e-15
        op = random_operator(rng, 4)
        spectrum = eigendecompose(op)
        for n in range(1, 5):
            assert eigfun_smoothing_residual(spectrum, op, n) < 1e-10 * np.max(np.abs(spectrum.eigfunc(n)))

    def test_counting_function(self):
        spectrum = LiouvilleSpectrum(lambdas=np.array([1.0, 2.0, 3.0]))
        assert counting_function(spectrum, 2.5) == 2
        assert counting_function(spectrum, 0.0) == 0
        assert counting_function(spectrum, np.inf) == 3


class TestReplicaSpectrum:
    """Exactness checks on a gamma=1 disc replica"""

    def test_positive_ascending(self, disc_replica):
        lambdas = disc_replica.spectrum.lambdas
        assert np.all(lambdas > 0.0) and np.all(np.diff(lambdas) >= 0.0)

    def test_orthonormal(self, disc_replica):
        assert orthonormality_error(disc_replica.spectrum) < 1e-8

    def test_trace_identities(self, disc_replica):
        op = disc_replica.operator
        assert inverse_square_sum_error(disc_replica.spectrum, op) < 1e-8
        assert hs_norm(op) == pytest.approx(np.linalg.norm(op.matrix), rel=1e-10)

    def test_smoothing_residual(self, disc_replica):
        spectrum, op = disc_replica.spectrum, disc_replica.operator
        for n in (1, 10, spectrum.size):
            assert eigfun_smoothing_residual(spectrum, op, n) < 1e-8 * np.max(np.abs(spectrum.eigfunc(n)))

    def test_stored_weights_reproduce_spectrum(self, disc_replica):
        rebuilt = replica_from_weights(disc_replica.operator.lattice, disc_replica.measure.weights, 1.0)
        assert np.array_equal(rebuilt.spectrum.lambdas, disc_replica.spectrum.lambdas)

    def test_scaling_covariance(self, disc_replica):
        scaled = disc_replica.measure.scaled(3.0)
        spectrum = eigendecompose(assemble_operator(disc_replica.operator.lattice, scaled))
        assert np.allclose(spectrum.lambdas, disc_replica.spectrum.lambdas / 3.0, rtol=1e-10, atol=0.0)
        base = weyl_fit(disc_replica.spectrum, disc_replica.measure)
        fit = weyl_fit(spectrum, scaled)
        assert fit.slope == pytest.approx(base.slope, rel=1e-9)
        assert fit.resolved_slope == pytest.approx(base.resolved_slope, rel=1e-9)


class TestWeyl:
    def test_window(self):
        assert weyl_window(100, (0.02, 0.2)) == (2, 20)
        with pytest.raises(ConfigurationError):
            weyl_window(40, (0.02, 0.2))
        with pytest.raises(ConfigurationError):
            weyl_window(100, (0.3, 0.2))

    def test_pure_weyl_spectrum(self):
        params = CouplingParams(gamma=1.0)
        mu = 2.5
        spectrum = LiouvilleSpectrum(lambdas=np.arange(1, 401) / (params.weyl_const * mu))
        fit = weyl_fit(spectrum, GmcMeasure(weights=np.array([mu]), gamma=1.0))
        assert fit.slope == pytest.approx(params.weyl_const, rel=1e-12)
        assert fit.discrepancy < 1e-9
        assert fit.relative_error < 1e-12
        assert fit.window == (8, 80)
        assert fit.resolved_slope == fit.slope
        assert fit.resolved_fraction == 1.0

    def test_saturated_levels_recover_constant(self, rng):
        weights = np.exp(rng.normal(-6.0, 2.0, 1000))
        c_true = 0.2
        levels = resolved_levels(weights, np.arange(1.0, 1001.0), c_true)
        fit = weyl_fit(LiouvilleSpectrum(lambdas=levels), GmcMeasure(weights=weights, gamma=1.0))
        assert fit.slope < 0.9 * c_true
        assert fit.resolved_slope == pytest.approx(c_true, rel=1e-8)
        assert 0.0 < fit.resolved_fraction < 1.0

    def test_counting_variance(self):
        spectra = [LiouvilleSpectrum(lambdas=np.array([1.0, 2.0, 3.0])),
                   LiouvilleSpectrum(lambdas=np.array([1.5, 2.5, 3.5]))]
        mean, var = counting_variance(spectra, [2.2])
        assert mean[0] == pytest.approx(1.5)
        assert var[0] == pytest.approx(0.5)


class TestClassicalReference:
    def test_square_first_eigenvalue(self):
        square = DomainSpec(kind=DomainKind.UNIT_SQUARE)
        assert classical_reference_spectrum(square, 1)[0] == pytest.approx(np.pi ** 2)
        head = classical_reference_spectrum(square, 3)
        assert head[1] == pytest.approx(2.5 * np.pi ** 2) and head[2] == pytest.approx(2.5 * np.pi ** 2)

    def test_disc_first_eigenvalue(self):
        assert classical_reference_spectrum(DomainSpec(), 1)[0] == pytest.approx(2.404825557695773 ** 2 / 2)

    @pytest.mark.parametrize("kind, area, perimeter", [
        (DomainKind.UNIT_DISC, np.pi, 2 * np.pi),
        (DomainKind.UNIT_SQUARE, 1.0, 4.0),
    ])
    def test_counting_slope(self, kind, area, perimeter):
        lambdas = classical_reference_spectrum(DomainSpec(kind=kind), 2000)
        k = np.arange(1000, 2001)
        lam = lambdas[999:]
        x = lam * area
        assert np.dot(x, k) / np.dot(x, x) == pytest.approx(1 / (2 * np.pi), rel=0.05)
        corrected = (k + perimeter * np.sqrt(2 * lam) / (4 * np.pi)) / (x / (2 * np.pi))
        assert np.mean(corrected) == pytest.approx(1.0, abs=0.02)

    def test_bad_count(self):
        with pytest.raises(ConfigurationError):
            classical_reference_spectrum(DomainSpec(), 0)


class TestSpectrumFiles:
    def test_spectrum_csv(self, tmp_path, disc_replica):
        path = write_spectrum_csv(tmp_path / "spectrum.csv", disc_replica.spectrum, ["run_id=abc"])
        text = path.read_text().splitlines()
        assert text[0] == "# run_id=abc" and text[1] == "n,lambda,mu_n"
        assert np.array_equal(read_spectrum_csv(path), disc_replica.spectrum.lambdas)

    def test_rejects_other_csv(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ConfigurationError):
            read_spectrum_csv(path)

    def test_eigenfunction_csv(self, tmp_path, disc_replica):
        grid = disc_replica.operator.lattice
        path = write_eigenfunction_csv(tmp_path / "f3.csv", grid, disc_replica.spectrum, 3)
        lines = [line for line in path.read_text().splitlines() if not line.startswith("#")]
        assert lines[0] == "i,x1,x2,f_n"
        assert len(lines) == grid.size + 1


class TestResolution:
    @pytest.fixture
    def weights(self, rng):
        return np.exp(rng.normal(-5.0, 1.5, 400))

    def test_uniform_masses_count_linearly(self):
        weights = np.full(100, 0.01)
        lambdas = np.array([10.0, 200.0, 999.0])
        assert np.allclose(resolved_count(weights, lambdas, 0.1), 0.1 * lambdas * 1.0)
        assert resolved_count(weights, 2000.0, 0.1)[0] == pytest.approx(100.0)

    def test_count_bounds(self, weights):
        lambdas = np.geomspace(1.0, 1e6, 30)
        counts = resolved_count(weights, lambdas, 0.2)
        assert np.all(np.diff(counts) > 0.0)
        assert np.all(counts <= np.minimum(weights.size, 0.2 * lambdas * weights.sum()) + 1e-9)

    def test_levels_invert_count(self, weights):
        xi = np.linspace(0.5, weights.size - 0.5, 50)
        levels = resolved_levels(weights, xi, 0.2)
        assert np.all(np.diff(levels) > 0.0)
        assert np.allclose(resolved_count(weights, levels, 0.2), xi, rtol=1e-10)

    def test_levels_past_the_lattice(self, weights):
        levels = resolved_levels(weights, [weights.size + 1.0, weights.size + 2.0], 0.2)
        assert levels[1] > levels[0] > 1.0 / (0.2 * weights.min())

    def test_resolved_mass(self, weights):
        assert resolved_mass(weights, 1e-12, 0.2)[0] == pytest.approx(1e-12 * weights.size / 0.2, rel=1e-6)
        assert resolved_mass(weights, 1e6, 0.2)[0] == pytest.approx(weights.sum(), rel=1e-12)
        assert point_resolution(0.01, 0.002, 0.2) == pytest.approx(1.0 - np.exp(-1.0))

    def test_fraction(self, weights):
        assert resolved_fraction(weights, 1e-3, 0.2) == pytest.approx(1.0)
        assert resolved_fraction(weights, 1e7, 0.2) < 0.01

    def test_unsaturated_window_keeps_slope(self):
        window = np.arange(10.0, 20.0)
        assert fit_resolved_slope(window, 0.5 * window, np.full(10, 0.1), 0.5) == 0.5

    def test_nonpositive_masses_rejected(self):
        with pytest.raises(NumericalError):
            resolved_count([1.0, 0.0], [1.0], 0.2)
