"""Image quality metrics: MSE, PSNR, windowed SSIM, and per-volume reports.

PSNR follows ``10 * log10(max_value^2 / MSE)`` with an infinity sentinel for
identical inputs. SSIM uses the canonical 11x11 Gaussian window (sigma 1.5,
k1=0.01, k2=0.03, dynamic range 1.0) evaluated over fully-overlapping window
positions only, so there is no boundary-padding ambiguity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import correlate1d

from .volumes import Axis, Volume, extract_slices


def mse(a, b) -> float:
    """Mean squared difference over all elements of two same-shape arrays."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a.astype(np.float64) - b.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr(pred, target, max_value: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` when the images are identical."""
    if max_value <= 0:
        raise ValueError(f"max_value must be positive, got {max_value}")
    err = mse(pred, target)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(max_value * max_value / err)


@dataclass(frozen=True)
class SSIMParams:
    """Window and stabilizer constants for :func:`ssim_2d`."""

    window_size: int = 11
    window_sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def __post_init__(self):
        if self.window_size % 2 != 1 or self.window_size < 1:
            raise ValueError(f"window size must be odd and positive, got {self.window_size}")


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """1D Gaussian weights of odd length ``size``, normalized to sum to 1."""
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    w = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return w / w.sum()


def ssim_2d(pred, target, params: SSIMParams = SSIMParams()) -> float:
    """Structural similarity between two 2D images.

    Local statistics use a separable Gaussian window; the per-pixel SSIM map
    is averaged over valid (fully-overlapping) window positions.
    """
    x = np.asarray(pred, dtype=np.float64)
    y = np.asarray(target, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    if x.ndim != 2:
        raise ValueError(f"ssim_2d expects 2D images, got {x.ndim}D")
    size = params.window_size
    if min(x.shape) < size:
        raise ValueError(
            f"image smaller than window: shape {x.shape} vs window {size}x{size}"
        )
    w = gaussian_window(size, params.window_sigma)
    half = size // 2

    def windowed(img):
        out = correlate1d(img, w, axis=0, mode="constant")
        out = correlate1d(out, w, axis=1, mode="constant")
        return out[half:-half, half:-half]

    mu_x = windowed(x)
    mu_y = windowed(y)
    e_xx = windowed(x * x)
    e_yy = windowed(y * y)
    e_xy = windowed(x * y)
    var_x = e_xx - mu_x * mu_x
    var_y = e_yy - mu_y * mu_y
    cov_xy = e_xy - mu_x * mu_y

    L = params.dynamic_range
    c1 = (params.k1 * L) ** 2
    c2 = (params.k2 * L) ** 2
    ssim_map = ((2.0 * mu_x * mu_y + c1) * (2.0 * cov_xy + c2)) / (
        (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    )
    return float(ssim_map.mean())


@dataclass
class MetricsReport:
    """Per-slice and aggregate PSNR/SSIM along one evaluation axis.

    ``psnr_mean`` averages the finite per-slice values; slices with infinite
    PSNR (zero error) are excluded from the mean and counted in
    ``n_infinite_psnr``. When every slice is infinite the mean is ``inf``.
    """

    axis: Axis
    n_slices: int
    psnr_per_slice: list = field(default_factory=list)
    ssim_per_slice: list = field(default_factory=list)
    psnr_mean: float = 0.0
    ssim_mean: float = 0.0
    n_infinite_psnr: int = 0

    def to_dict(self) -> dict:
        """JSON-safe dict; non-finite PSNR values become null."""
        return {
            "axis": self.axis.name.lower(),
            "n_slices": self.n_slices,
            "psnr_per_slice": [
                v if math.isfinite(v) else None for v in self.psnr_per_slice
            ],
            "ssim_per_slice": list(self.ssim_per_slice),
            "psnr_mean": self.psnr_mean if math.isfinite(self.psnr_mean) else None,
            "ssim_mean": self.ssim_mean,
            "n_infinite_psnr": self.n_infinite_psnr,
        }

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def evaluate_volume(
    pred: Volume,
    target: Volume,
    axis=Axis.SAGITTAL,
    ssim_params: SSIMParams = SSIMParams(),
    max_value: float = 1.0,
) -> MetricsReport:
    """Slice-wise PSNR/SSIM of a converted volume against ground truth."""
    axis = Axis.coerce(axis)
    if pred.shape != target.shape or pred.spacing != target.spacing:
        raise ValueError(
            f"geometry mismatch: shapes {pred.shape}/{target.shape}, "
            f"spacings {pred.spacing}/{target.spacing}"
        )
    psnrs = []
    ssims = []
    for sp, st in zip(extract_slices(pred, axis), extract_slices(target, axis)):
        psnrs.append(psnr(sp.data, st.data, max_value=max_value))
        ssims.append(ssim_2d(sp.data, st.data, ssim_params))
    finite = [v for v in psnrs if math.isfinite(v)]
    psnr_mean = float(np.mean(finite)) if finite else math.inf
    return MetricsReport(
        axis=axis,
        n_slices=len(psnrs),
        psnr_per_slice=psnrs,
        ssim_per_slice=ssims,
        psnr_mean=psnr_mean,
        ssim_mean=float(np.mean(ssims)),
        n_infinite_psnr=len(psnrs) - len(finite),
    )
