import numpy as np

from src.domain.base import BaseDomain, mirror_upper

# e^{-2 pi J} < 1e-16 for J = 6
IMAGE_SHELLS = 6
ROW_CHUNK = 256
# sign of each of the four image families in the second coordinate
IMAGE_SIGNS = (1.0, -1.0, -1.0, 1.0)


def log_image_kernel(theta, t):
    """-1/2 log(1 - 2 e^{-t} cos(theta) + e^{-2t}) = sum_m cos(m theta) e^{-m t} / m."""
    q = np.exp(-t)
    return -0.5 * np.log(np.expm1(-t) ** 2 + 4.0 * q * np.sin(0.5 * theta) ** 2)


def _image_offsets(a, b):
    gap = np.abs(a - b)
    return (np.pi * gap, np.pi * (a + b), np.pi * (2.0 - a - b), np.pi * (2.0 - gap))


class UnitSquare(BaseDomain):
    """Unit square (0,1)^2.

    The grid kernel uses the resummed sine series: summing the second axis in
    closed form leaves log kernels over the image offsets, which is the
    K -> infinity limit of the direct series.
    """

    name = "unit_square"
    area = 1.0
    perimeter = 4.0

    def __init__(self, series_cutoff: int = 64):
        self.series_cutoff = series_cutoff

    @property
    def bounding_box(self):
        return (0.0, 0.0, 1.0, 1.0)

    def contains(self, points):
        points = np.atleast_2d(points)
        return np.all((points > 0.0) & (points < 1.0), axis=1)

    def boundary_distance(self, points):
        points = np.atleast_2d(points)
        return np.minimum(points, 1.0 - points).min(axis=1)

    def green(self, x, y, cutoff: int = None) -> float:
        """Truncated eigen-series sum_{m,k <= K} phi_mk(x) phi_mk(y) / lambda_mk."""
        x, y = self.require_distinct(x, y)
        cutoff = cutoff or self.series_cutoff
        modes = np.arange(1, cutoff + 1)
        sx = np.sin(np.pi * modes * x[0]) * np.sin(np.pi * modes * y[0])
        sy = np.sin(np.pi * modes * x[1]) * np.sin(np.pi * modes * y[1])
        lam = 0.5 * np.pi ** 2 * (modes[:, None] ** 2 + modes[None, :] ** 2)
        return float(np.sum(4.0 * np.outer(sx, sy) / lam))

    def green_matrix(self, points):
        x1 = points[:, 0]
        x2 = points[:, 1]
        size = points.shape[0]
        out = np.zeros((size, size))
        for start in range(0, size, ROW_CHUNK):
            stop = min(start + ROW_CHUNK, size)
            d = np.pi * (x1[start:stop, None] - x1[None, :])
            s = np.pi * (x1[start:stop, None] + x1[None, :])
            offsets = _image_offsets(x2[start:stop, None], x2[None, :])
            block = np.zeros((stop - start, size))
            with np.errstate(divide="ignore", invalid="ignore"):
                for shell in range(IMAGE_SHELLS + 1):
                    for sign, offset in zip(IMAGE_SIGNS, offsets):
                        t = offset + 2.0 * np.pi * shell
                        block += sign * (log_image_kernel(d, t) - log_image_kernel(s, t))
            out[start:stop] = block / np.pi
        return mirror_upper(out)

    def harmonic_part(self, points):
        points = np.atleast_2d(points)
        x1 = points[:, 0]
        x2 = points[:, 1]
        offsets = _image_offsets(x2, x2)
        total = np.full(x1.shape, -np.log(np.pi))
        for shell in range(IMAGE_SHELLS + 1):
            for family, (sign, offset) in enumerate(zip(IMAGE_SIGNS, offsets)):
                t = offset + 2.0 * np.pi * shell
                if not (shell == 0 and family == 0):
                    total += sign * log_image_kernel(0.0, t)
                total -= sign * log_image_kernel(2.0 * np.pi * x1, t)
        return total / np.pi
