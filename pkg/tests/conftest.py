"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np

from topopeaks import LabeledDataset, Spectrum


def mk(values, mz=None) -> Spectrum:
    """Spectrum over an integer grid unless an explicit axis is given."""
    values = np.asarray(values, dtype=float)
    if mz is None:
        mz = np.arange(values.size, dtype=float)
    return Spectrum(mz=mz, intensity=values)


def gaussian_bumps(q, centers, heights, sigma=1.5):
    grid = np.arange(q, dtype=float)
    out = np.zeros(q)
    for c, h in zip(centers, heights):
        out += h * np.exp(-((grid - c) ** 2) / (2.0 * sigma**2))
    return out


def two_class_dataset(n=80, q=60, seed=7, n_groups=4) -> LabeledDataset:
    """Separable synthetic cohort: shared bumps plus one class-coded bump.

    Groups are contiguous blocks so every group carries both classes.
    """
    rng = np.random.default_rng(seed)
    mz = np.linspace(200.0, 800.0, q)
    common = [(10, 3.0), (25, 2.5), (45, 3.5)]
    rows = np.empty((n, q))
    labels = np.empty(n, dtype=np.int64)
    groups = []
    block = n // n_groups
    for i in range(n):
        lab = i % 2
        heights = [h + rng.normal(0.0, 0.2) for _, h in common]
        centers = [c for c, _ in common]
        centers.append(33)
        heights.append(5.0 + rng.normal(0.0, 0.3) if lab else 1.5 + rng.normal(0.0, 0.3))
        row = gaussian_bumps(q, centers, heights)
        row += np.maximum(rng.normal(0.0, 0.05, size=q), 0.0)
        rows[i] = row
        labels[i] = lab
        groups.append(f"g{i // block}")
    return LabeledDataset(mz=mz, intensities=rows, labels=labels, groups=tuple(groups))
