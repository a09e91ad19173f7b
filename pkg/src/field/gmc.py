"""Lattice Gaussian multiplicative chaos and ball-mass diagnostics."""
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from src.bootstrap.errors import ConfigurationError
from src.domain.grid import macro_cell_labels
from src.field.schema import CouplingParams, CovarianceModel, FieldSample, GmcMeasure


def lattice_gmc_weights(values: np.ndarray, gamma: float, mesh: float, cell_area: float) -> np.ndarray:
    """mu_i = cell_area * eps^{gamma^2/2} * exp(gamma h_i)"""
    if gamma == 0.0:
        return np.full(np.shape(values), cell_area, dtype=float)
    return cell_area * mesh ** (gamma ** 2 / 2.0) * np.exp(gamma * np.asarray(values))


def gmc_weights(field: FieldSample, params: CouplingParams) -> GmcMeasure:
    grid = field.model.grid
    weights = lattice_gmc_weights(field.values, params.gamma, grid.mesh, grid.cell_area)
    return GmcMeasure(weights=weights, gamma=params.gamma, lattice=grid)


def expected_gmc_weights(model: CovarianceModel, params: CouplingParams) -> np.ndarray:
    """Exact lattice first moment E[mu_i] = cell_area * eps^{g^2/2} * exp(g^2 C_ii / 2)."""
    grid = model.grid
    half_var = 0.5 * params.gamma ** 2 * np.diag(model.cov)
    return grid.cell_area * grid.mesh ** (params.gamma ** 2 / 2.0) * np.exp(half_var)


def ball_mass_profile(measure: GmcMeasure, radii: Sequence[float]) -> np.ndarray:
    """sup over lattice centres of mu(B(x, r)) for each radius."""
    if measure.lattice is None:
        raise ConfigurationError("ball_mass_profile needs a measure attached to a lattice")
    points = measure.lattice.points
    tree = cKDTree(points)
    profile = np.empty(len(radii))
    for k, radius in enumerate(radii):
        neighbours = tree.query_ball_point(points, r=float(radius))
        profile[k] = max(measure.weights[idx].sum() for idx in neighbours)
    return profile


def fit_ball_exponent(radii: Sequence[float], profile: np.ndarray) -> float:
    """Log-log slope q of sup_x mu(B(x, r)) ~ C r^q."""
    slope, _ = np.polyfit(np.log(np.asarray(radii)), np.log(profile), 1)
    return float(slope)


def macro_cell_masses(measure: GmcMeasure, k: int) -> np.ndarray:
    labels = macro_cell_labels(measure.lattice, k)
    return np.bincount(labels, weights=measure.weights, minlength=k * k)
