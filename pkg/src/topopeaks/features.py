"""Dense persistence feature vectors and matrices."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset
from .persistence import _check_k, _filtered_persistence_vector


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """n x q matrix of persistence vectors on a shared m/z axis."""

    values: np.ndarray
    mz: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        mz = np.array(self.mz, dtype=np.float64, copy=True)
        if values.ndim != 2 or mz.ndim != 1 or values.shape[1] != mz.size:
            raise ValueError(f"values must have shape (n, {mz.size})")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("persistence values must be finite and non-negative")
        values.flags.writeable = False
        mz.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mz", mz)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]


def to_persistence_vector(pairs, q: int) -> np.ndarray:
    """Place each pair's persistence at its position in a length-q zero vector."""
    vec = np.zeros(int(q))
    for p in pairs:
        if not 0 <= p.position < q:
            raise ValueError(f"position {p.position} outside spectrum of length {q}")
        vec[p.position] = p.persistence
    return vec


def _vector_chunk(args) -> np.ndarray:
    rows, k = args
    return np.array([_filtered_persistence_vector(row, k) for row in rows])


def _map_rows(rows: np.ndarray, k: float, workers: int) -> np.ndarray:
    if rows.shape[0] == 0:
        return np.zeros(rows.shape)
    if workers <= 1 or rows.shape[0] < 4 * workers:
        return _vector_chunk((rows, k))
    chunks = np.array_split(rows, 4 * workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_vector_chunk, ((c, k) for c in chunks)))
    return np.concatenate([p.reshape(-1, rows.shape[1]) for p in parts])


def build_matrix(dataset: LabeledDataset, k, workers: int = 1) -> FeatureMatrix:
    """Top-k% persistence feature matrix for a labeled dataset.

    Row i is zero except at the retained peak positions of spectrum i, which
    carry their persistence values.
    """
    k = _check_k(k)
    values = _map_rows(dataset.intensities, k, workers)
    return FeatureMatrix(values, dataset.mz)


def write_matrix_csv(matrix: FeatureMatrix, path) -> None:
    """Matrix CSV: header row of m/z values, one persistence vector per row."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(repr(v) for v in matrix.mz.tolist()) + "\n")
        for row in matrix.values:
            fh.write(",".join(repr(v) for v in row.tolist()) + "\n")
