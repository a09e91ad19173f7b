from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np

from src.bootstrap.errors import DomainError, SingularityError


class BaseDomain(ABC):
    """A bounded planar domain with an explicit Brownian Green function.

    All Green values use the occupation-density normalization of standard
    planar Brownian motion: g(x, y) = -(1/pi) log|x - y| + O(1).
    """

    name: str = "domain"
    area: float
    perimeter: float

    @property
    @abstractmethod
    def bounding_box(self) -> Tuple[float, float, float, float]:
        """(x_lo, y_lo, x_hi, y_hi)"""

    @abstractmethod
    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points strictly inside the domain."""

    @abstractmethod
    def green_matrix(self, points: np.ndarray) -> np.ndarray:
        """Symmetric matrix of g(x_i, x_j); the diagonal is left at zero."""

    @abstractmethod
    def harmonic_part(self, points: np.ndarray) -> np.ndarray:
        """Regular part of g at coincident points: lim g(x, y) + (1/pi) log|x - y|."""

    @abstractmethod
    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        """Euclidean distance to the boundary; meaningful for points inside."""

    @abstractmethod
    def green(self, x, y) -> float:
        """Point evaluation of g(x, y) for x != y."""

    def side(self) -> float:
        x_lo, _, x_hi, _ = self.bounding_box
        return x_hi - x_lo

    def conformal_radius(self, points: np.ndarray) -> np.ndarray:
        points = self.require_inside(points)
        return np.exp(np.pi * self.harmonic_part(points))

    def require_inside(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if not np.all(self.contains(points)):
            raise DomainError(f"point(s) outside {self.name}: {points[~self.contains(points)][:3].tolist()}")
        return points

    def require_distinct(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        pts = self.require_inside(np.vstack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)]))
        if np.allclose(pts[0], pts[1], rtol=0.0, atol=0.0):
            raise SingularityError(f"Green function is singular at x = y = {pts[0].tolist()}")
        return pts[0], pts[1]


def mirror_upper(matrix: np.ndarray) -> np.ndarray:
    """Exactly symmetric copy built from the strict upper triangle."""
    upper = np.triu(matrix, k=1)
    return upper + upper.T
