from pathlib import Path
from typing import Sequence

import numpy as np

from src.bootstrap.csv_io import read_csv, write_csv
from src.bootstrap.errors import ConfigurationError
from src.domain.schema import Lattice
from src.spectral.eigen import LiouvilleSpectrum

SPECTRUM_HEADER = ("n", "lambda", "mu_n")
EIGENFUNCTION_HEADER = ("i", "x1", "x2", "f_n")


def write_spectrum_csv(path: Path, spectrum: LiouvilleSpectrum, comments: Sequence[str] = ()) -> Path:
    rows = ((n, lam, 1.0 / lam) for n, lam in enumerate(spectrum.lambdas, start=1))
    return write_csv(path, SPECTRUM_HEADER, rows, comments)


def read_spectrum_csv(path: Path) -> np.ndarray:
    _, header, rows = read_csv(path)
    if tuple(header) != SPECTRUM_HEADER:
        raise ConfigurationError(f"{path} is not a spectrum CSV (header {header})")
    return np.array([float(row[1]) for row in rows])


def write_eigenfunction_csv(path: Path, lattice: Lattice, spectrum: LiouvilleSpectrum, n: int,
                            comments: Sequence[str] = ()) -> Path:
    f = spectrum.eigfunc(n)
    rows = ((i, x[0], x[1], value) for i, (x, value) in enumerate(zip(lattice.points, f)))
    return write_csv(path, EIGENFUNCTION_HEADER, rows, [*comments, f"n={n}"])
