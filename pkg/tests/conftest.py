import numpy as np
import pytest
from fastapi.testclient import TestClient

from src.api.main import app
from src.domain.grid import build_grid
from src.domain.schema import DomainKind, DomainSpec
from src.field.covariance import build_covariance
from src.field.schema import CouplingParams
from src.spectral.pipeline import build_replica
from src.worker.config import ExperimentConfig

DISC = DomainSpec()
SQUARE = DomainSpec(kind=DomainKind.UNIT_SQUARE)


@pytest.fixture
def client():
    """Test client for FastAPI app"""
    return TestClient(app)


@pytest.fixture(scope="session")
def disc_grid():
    """Unit disc, n=16"""
    return build_grid(DISC, 16)


@pytest.fixture(scope="session")
def square_grid():
    """Unit square, n=16 (P=225)"""
    return build_grid(SQUARE, 16)


@pytest.fixture(scope="session")
def disc_model(disc_grid):
    return build_covariance(disc_grid)


@pytest.fixture(scope="session")
def disc_replica(disc_model):
    """One gamma=1 replica on the n=16 disc"""
    return build_replica(disc_model, CouplingParams(gamma=1.0), seed=7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_config(tmp_path):
    """Cheap experiment config writing under a temporary directory"""
    return ExperimentConfig(n=16, gamma=1.0, base_seed=3, output_dir=tmp_path, window_frac=(0.02, 0.5))
