import numpy as np

from src.domain.base import BaseDomain, mirror_upper

ROW_CHUNK = 512


class UnitDisc(BaseDomain):
    """Unit disc; closed-form Green function via the Mobius image."""

    name = "unit_disc"
    area = np.pi
    perimeter = 2.0 * np.pi

    @property
    def bounding_box(self):
        return (-1.0, -1.0, 1.0, 1.0)

    def contains(self, points):
        points = np.atleast_2d(points)
        return np.einsum("ij,ij->i", points, points) < 1.0

    def boundary_distance(self, points):
        points = np.atleast_2d(points)
        return 1.0 - np.hypot(points[:, 0], points[:, 1])

    def green(self, x, y) -> float:
        x, y = self.require_distinct(x, y)
        z = complex(x[0], x[1])
        w = complex(y[0], y[1])
        return float(np.log(abs(1.0 - z * np.conj(w)) / abs(z - w)) / np.pi)

    def green_matrix(self, points):
        z = points[:, 0] + 1j * points[:, 1]
        size = z.shape[0]
        out = np.zeros((size, size))
        for start in range(0, size, ROW_CHUNK):
            stop = min(start + ROW_CHUNK, size)
            zi = z[start:stop, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                block = np.log(np.abs(1.0 - zi * np.conj(z)[None, :]) / np.abs(zi - z[None, :])) / np.pi
            out[start:stop] = block
        return mirror_upper(out)

    def harmonic_part(self, points):
        points = np.atleast_2d(points)
        return np.log1p(-np.einsum("ij,ij->i", points, points)) / np.pi

    def conformal_radius(self, points):
        points = self.require_inside(points)
        return 1.0 - np.einsum("ij,ij->i", points, points)
