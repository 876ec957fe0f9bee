"""Synthetic mass-spectrometry images: generation, noise, denoising, benchmarks.

A ground-truth image carries two disjoint regions, a filled circle in the
top-left quadrant and a square in the bottom-right, each with its own half of
the peak set. Every pixel of a region shares that region's noiseless
spectrum; background pixels hold the flat baseline.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import MSImage
from .features import _map_rows
from .persistence import _check_k

PEAK_SIGMA = 2.0  # Gaussian peak width, in axis steps
_EDGE = 15  # keep peaks this many axis steps away from the axis ends
_GAP = 10  # minimum distance between peak positions, in axis steps


@dataclass(frozen=True)
class SimulationSpec:
    """Parameters of one synthetic image."""

    size: int = 30
    mz_range: tuple[float, float] = (500.0, 2000.0)
    n_mz: int = 3466
    n_peaks: int = 50
    baseline: float = 0.0
    seed: int = 1234

    def __post_init__(self):
        if self.size < 8:
            raise ValueError("size must be at least 8 so the regions stay disjoint")
        if self.mz_range[0] >= self.mz_range[1]:
            raise ValueError("mz_range must be increasing")
        if self.n_peaks < 2:
            raise ValueError("need at least 2 peaks, one per region")
        if self.baseline < 0:
            raise ValueError("baseline must be non-negative")
        slots = self.n_mz - 2 * _EDGE - (self.n_peaks - 1) * _GAP
        if slots < self.n_peaks:
            raise ValueError(
                f"n_mz={self.n_mz} too small for {self.n_peaks} separated peaks"
            )


@dataclass(frozen=True)
class NoiseModel:
    """Additive noise: ``gaussian`` uses sd=level, ``poisson`` uses lam=level."""

    kind: str = "none"
    level: float = 0.0
    seed: int = 1234

    def __post_init__(self):
        if self.kind not in ("none", "gaussian", "poisson"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.level < 0:
            raise ValueError("noise level must be non-negative")


def _region_masks(size: int) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = np.mgrid[0:size, 0:size]
    center = size * 0.25
    radius = size * 0.18
    circle = (rows - center) ** 2 + (cols - center) ** 2 <= radius**2
    lo = round(size * 0.58)
    hi = round(size * 0.88)
    square = (rows >= lo) & (rows < hi) & (cols >= lo) & (cols < hi)
    return circle, square


def generate_ground_truth(spec: SimulationSpec) -> tuple[MSImage, np.ndarray]:
    """Noiseless image plus the boolean mask of its two regions.

    Peak positions are drawn uniformly over the axis subject to a minimum
    separation of 10 steps (so every peak is a distinct spectral mode), peak
    heights uniformly from [1, 10]; a random half of the peaks goes to the
    circle, the rest to the square. Identical specs give bit-identical output.
    """
    rng = np.random.default_rng(spec.seed)
    slots = spec.n_mz - 2 * _EDGE - (spec.n_peaks - 1) * _GAP
    base = np.sort(rng.choice(slots, size=spec.n_peaks, replace=False))
    peak_idx = _EDGE + base + _GAP * np.arange(spec.n_peaks)
    heights = rng.uniform(1.0, 10.0, spec.n_peaks)
    assign = rng.permutation(spec.n_peaks)
    circle_ids = assign[: spec.n_peaks // 2]
    square_ids = assign[spec.n_peaks // 2 :]

    axis = np.arange(spec.n_mz, dtype=np.float64)

    def region_spectrum(ids: np.ndarray) -> np.ndarray:
        offsets = axis[None, :] - peak_idx[ids][:, None]
        shapes = np.exp(-(offsets**2) / (2.0 * PEAK_SIGMA**2))
        return spec.baseline + heights[ids] @ shapes

    circle_mask, square_mask = _region_masks(spec.size)
    if (circle_mask & square_mask).any():
        raise RuntimeError("region masks overlap")
    n_px = spec.size * spec.size
    spectra = np.full((n_px, spec.n_mz), float(spec.baseline))
    spectra[circle_mask.ravel()] = region_spectrum(circle_ids)
    spectra[square_mask.ravel()] = region_spectrum(square_ids)
    mz = np.linspace(spec.mz_range[0], spec.mz_range[1], spec.n_mz)
    image = MSImage(spec.size, spec.size, mz, spectra)
    return image, circle_mask | square_mask


def add_noise(image: MSImage, model: NoiseModel) -> MSImage:
    """Additive noise per bin; Gaussian draws are clamped at zero."""
    if model.kind == "none":
        return image
    rng = np.random.default_rng(model.seed)
    if model.kind == "gaussian":
        noisy = image.spectra + rng.normal(0.0, model.level, image.spectra.shape)
        noisy = np.maximum(noisy, 0.0)
    else:
        noisy = image.spectra + rng.poisson(model.level, image.spectra.shape)
    return MSImage(image.width, image.height, image.mz, noisy)


def denoise(image: MSImage, k, workers: int = 1) -> MSImage:
    """Replace each pixel spectrum by its top-k% persistence vector.

    The output spectrum is zero except at retained peak positions, which carry
    their persistence values. The result is deterministic and independent of
    ``workers``.
    """
    k = _check_k(k)
    rows = _map_rows(image.spectra, k, workers)
    return MSImage(image.width, image.height, image.mz, rows)


def mean_image(image: MSImage) -> np.ndarray:
    """Per-pixel mean intensity as a (height, width) grid."""
    return image.spectra.mean(axis=1).reshape(image.height, image.width)


def otsu_threshold(values: np.ndarray) -> float:
    """Otsu's threshold over a 256-bin histogram of the values."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError("cannot threshold empty input")
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        return lo
    hist, edges = np.histogram(v, bins=256, range=(lo, hi))
    centers = (edges[:-1] + edges[1:]) / 2.0
    w0 = np.cumsum(hist).astype(np.float64)
    w1 = v.size - w0
    sum0 = np.cumsum(hist * centers)
    total = sum0[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        mu0 = sum0 / w0
        mu1 = (total - sum0) / w1
        var_b = w0 * w1 * (mu0 - mu1) ** 2
    var_b[(w0 == 0) | (w1 == 0)] = -np.inf
    return float(edges[int(np.argmax(var_b)) + 1])


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection over union of two boolean masks (1.0 when both are empty)."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError("masks must have the same shape")
    union = np.logical_or(a, b).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(a, b).sum() / union)


def recovered_mask(image: MSImage) -> np.ndarray:
    """Binary region estimate: Otsu threshold on the mean-intensity image."""
    mean = mean_image(image)
    return mean > otsu_threshold(mean)


@dataclass(frozen=True)
class BenchResult:
    size: int
    pixels: int
    seconds: float
    seconds_per_pixel: float


def bench_denoise(sizes, noise: NoiseModel, k=25.0, *, baseline: float = 0.0,
                  n_mz: int = 3466, n_peaks: int = 50, seed: int = 1234,
                  workers: int = 1) -> list[BenchResult]:
    """Wall-clock denoising time per image size, one row per size."""
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ValueError("need at least one size")
    k = _check_k(k)
    results = []
    for size in sizes:
        spec = SimulationSpec(size=size, baseline=baseline, n_mz=n_mz,
                              n_peaks=n_peaks, seed=seed)
        image, _ = generate_ground_truth(spec)
        noisy = add_noise(image, noise)
        t0 = time.perf_counter()
        denoise(noisy, k, workers)
        dt = time.perf_counter() - t0
        results.append(BenchResult(size, size * size, dt, dt / (size * size)))
    return results
