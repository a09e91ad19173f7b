"""LQGF field snapshot: magic, u32 version, u32 count, count f64 h, count f64 mu (little-endian)."""
from pathlib import Path
from typing import Tuple

import numpy as np

from src.bootstrap.errors import ConfigurationError

MAGIC = b"LQGF"
FORMAT_VERSION = 1


def write_snapshot(path: Path, values: np.ndarray, weights: np.ndarray) -> Path:
    if values.shape != weights.shape:
        raise ConfigurationError(f"snapshot arrays differ in length: {values.shape} vs {weights.shape}")
    path = Path(path)
    header = np.array([FORMAT_VERSION, values.shape[0]], dtype="<u4")
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(header.tobytes())
        fh.write(np.asarray(values, dtype="<f8").tobytes())
        fh.write(np.asarray(weights, dtype="<f8").tobytes())
    return path


def read_snapshot(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise ConfigurationError(f"{path} is not an LQGF snapshot")
    version, count = np.frombuffer(raw[4:12], dtype="<u4")
    if version != FORMAT_VERSION:
        raise ConfigurationError(f"unsupported LQGF version {version}")
    body = np.frombuffer(raw[12:], dtype="<f8")
    if body.shape[0] != 2 * count:
        raise ConfigurationError(f"{path} truncated: expected {2 * count} floats, found {body.shape[0]}")
    return body[:count].copy(), body[count:].copy()
